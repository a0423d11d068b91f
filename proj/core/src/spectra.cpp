#include "macf/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>

#include "macf/matcore.hpp"
#include "macf/quadrature.hpp"
#include "macf/rng.hpp"

namespace macf {

namespace {

double one_minus_s_eps(double r, double eps) { return s_profile(-r / eps); }

std::vector<double> sample(const std::vector<double>& r, const std::function<double(double)>& fn) {
    std::vector<double> out(r.size());
    std::transform(r.begin(), r.end(), out.begin(), fn);
    return out;
}

// Ground state φ with L_i φ = 0 on the line (i = 1, 2, 3).
std::vector<double> ground_state(int i, const std::vector<double>& r, double eps) {
    switch (i) {
        case 1: return sample(r, [eps](double x) { return theta_eps(x, eps); });
        case 2: return sample(r, [eps](double x) { return s_eps(x, eps); });
        case 3: return sample(r, [eps](double x) { return one_minus_s_eps(x, eps); });
        default: throw DomainError("ground state defined for i = 1, 2, 3");
    }
}

double max_abs_sq(const std::vector<double>& q) {
    double m = 0.0;
    for (double v : q) m = std::max(m, v * v);
    return m;
}

std::vector<double> times(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] * b[j];
    return out;
}

}  // namespace

double s_eps(double r, double eps) { return s_profile(r / eps); }

double theta_eps(double r, double eps) { return s_derivs(r / eps).d1; }

IntervalOperator::IntervalOperator(int i, double eps, std::size_t grid, Boundary bc, Discretization disc)
    : i_(i), eps_(eps), h_(0.0), bc_(bc), disc_(disc) {
    if (i < 1 || i > 5) throw DomainError("IntervalOperator: i must be in 1..5");
    if (!(eps > 0.0)) throw DomainError("IntervalOperator: epsilon must be positive");
    if (grid < 16) throw DomainError("IntervalOperator: need at least 16 grid points");
    h_ = 2.0 / static_cast<double>(grid - 1);
    if (h_ > eps / 10.0 * (1.0 + 1e-12))
        throw DomainError("IntervalOperator: grid spacing must be <= eps/10 to resolve the layer");
    r_.resize(grid);
    for (std::size_t j = 0; j < grid; ++j) r_[j] = -1.0 + h_ * static_cast<double>(j);
    r_.back() = 1.0;
    if (grid % 2 == 1) r_[grid / 2] = 0.0;

    const double inv_eps2 = 1.0 / (eps * eps);
    pot_.resize(grid);
    for (std::size_t j = 0; j < grid; ++j) pot_[j] = kappa(i, s_eps(r_[j], eps)) * inv_eps2;
    if (disc == Discretization::factored && i <= 3) {
        const auto phi = ground_state(i, r_, eps);
        for (std::size_t j = 1; j + 1 < grid; ++j)
            pot_[j] = (phi[j - 1] - 2.0 * phi[j] + phi[j + 1]) / (h_ * h_ * phi[j]);
    }

    mass_.assign(grid, h_);
    if (bc == Boundary::neumann) {
        mass_.front() = 0.5 * h_;
        mass_.back() = 0.5 * h_;
    } else {
        mass_.front() = 0.0;
        mass_.back() = 0.0;
    }
}

IntervalOperator IntervalOperator::standard(int i, double eps, Boundary bc, Discretization disc) {
    const auto cells = static_cast<std::size_t>(std::ceil(2.0 / (eps / 20.0) - 1e-9));
    return IntervalOperator(i, eps, cells + 1, bc, disc);
}

double IntervalOperator::quadratic_form(const std::vector<double>& q) const {
    if (q.size() != r_.size()) throw DimensionError("quadratic_form: size mismatch");
    const std::size_t n = q.size();
    auto val = [&](std::size_t j) {
        return (bc_ == Boundary::dirichlet && (j == 0 || j + 1 == n)) ? 0.0 : q[j];
    };
    double grad = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double d = val(j + 1) - val(j);
        grad += d * d;
    }
    double pot = 0.0;
    for (std::size_t j = 0; j < n; ++j) pot += mass_[j] * pot_[j] * val(j) * val(j);
    return grad / h_ + pot;
}

double IntervalOperator::l2(const std::vector<double>& q) const { return inner(q, q); }

double IntervalOperator::inner(const std::vector<double>& a, const std::vector<double>& b) const {
    if (a.size() != r_.size() || b.size() != r_.size()) throw DimensionError("inner: size mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += mass_[j] * a[j] * b[j];
    return acc;
}

double IntervalOperator::weighted_dirichlet(const std::vector<double>& phi, const std::vector<double>& g) const {
    if (phi.size() != r_.size() || g.size() != r_.size()) throw DimensionError("weighted_dirichlet: size mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < g.size(); ++j) {
        const double d = g[j + 1] - g[j];
        acc += phi[j] * phi[j + 1] * d * d;
    }
    return acc / h_;
}

Tridiagonal IntervalOperator::system() const {
    const std::size_t a = first_active();
    const std::size_t b = last_active();
    const std::size_t n = r_.size();
    Tridiagonal t;
    for (std::size_t j = a; j <= b; ++j) {
        const double edges = (j == 0 || j + 1 == n) ? 1.0 : 2.0;
        t.diag.push_back(edges / (h_ * mass_[j]) + pot_[j]);
        if (j < b) t.offdiag.push_back(-1.0 / (h_ * std::sqrt(mass_[j] * mass_[j + 1])));
    }
    return t;
}

OperatorSpectrum eigen_smallest(const IntervalOperator& op, std::size_t k) {
    const auto pairs = eigen_smallest(op.system(), k);
    OperatorSpectrum out;
    out.values = pairs.values;
    out.residuals = pairs.residuals;
    const std::size_t a = op.first_active();
    for (const auto& v : pairs.vectors) {
        std::vector<double> u(op.r().size(), 0.0);
        for (std::size_t j = 0; j < v.size(); ++j) u[a + j] = v[j] / std::sqrt(op.mass()[a + j]);
        out.vectors.push_back(std::move(u));
    }
    return out;
}

double ground_state_rayleigh(const IntervalOperator& op) {
    if (op.discretization() != Discretization::factored || op.boundary() != Boundary::neumann || op.index() > 3)
        throw DomainError("ground_state_rayleigh: needs the factored Neumann operator with i <= 3");
    const auto phi = ground_state(op.index(), op.r(), op.epsilon());
    const std::size_t n = phi.size();
    const double h = op.spacing();
    const auto& v = op.potential();
    // Interior rows annihilate φ exactly, leaving the boundary fluxes and end potentials.
    const double num = (phi[n - 1] * (phi[n - 1] - phi[n - 2]) - phi[0] * (phi[1] - phi[0])) / h +
                       0.5 * h * (v[0] * phi[0] * phi[0] + v[n - 1] * phi[n - 1] * phi[n - 1]);
    return num / op.l2(phi);
}

std::vector<TrialFunction> trial_family(const IntervalOperator& op, std::uint64_t seed, std::size_t random_count) {
    const auto& r = op.r();
    const double eps = op.epsilon();
    std::vector<TrialFunction> out;
    std::vector<std::vector<double>> cheb;
    cheb.push_back(std::vector<double>(r.size(), 1.0));
    cheb.push_back(r);
    for (int k = 2; k <= 12; ++k) {
        std::vector<double> t(r.size());
        for (std::size_t j = 0; j < r.size(); ++j) t[j] = 2.0 * r[j] * cheb[k - 1][j] - cheb[k - 2][j];
        cheb.push_back(std::move(t));
    }
    for (int k = 0; k <= 12; ++k) out.push_back({"T" + std::to_string(k), cheb[static_cast<std::size_t>(k)]});
    out.push_back({"s_eps", sample(r, [eps](double x) { return s_eps(x, eps); })});
    out.push_back({"1-s_eps", sample(r, [eps](double x) { return one_minus_s_eps(x, eps); })});
    out.push_back({"theta_eps", sample(r, [eps](double x) { return theta_eps(x, eps); })});
    for (double r0 : {-1.0, -0.5, 0.5, 1.0}) {
        char label[32];
        std::snprintf(label, sizeof label, "theta_eps(r%+g)", -r0);
        out.push_back({label,
                       sample(r, [eps, r0](double x) { return theta_eps(x - r0, eps); })});
    }
    Rng rng(seed);
    for (std::size_t m = 0; m < random_count; ++m) {
        std::vector<double> f(r.size(), 0.0);
        for (int k = 0; k <= 12; ++k) {
            const double c = rng.normal() / ((1.0 + k) * (1.0 + k));
            for (std::size_t j = 0; j < r.size(); ++j) f[j] += c * cheb[static_cast<std::size_t>(k)][j];
        }
        out.push_back({"random" + std::to_string(m), std::move(f)});
    }
    return out;
}

std::string to_string(CoercivityLemma l) {
    switch (l) {
        case CoercivityLemma::L23: return "coercivity/L23";
        case CoercivityLemma::L1: return "coercivity/L1";
        case CoercivityLemma::L1out: return "coercivity/L1out";
    }
    return "?";
}

std::string to_string(ProductLemma l) {
    switch (l) {
        case ProductLemma::P23: return "product/P23";
        case ProductLemma::P34: return "product/P34";
        case ProductLemma::P24: return "product/P24";
        case ProductLemma::P12: return "product/P12";
        case ProductLemma::P13: return "product/P13";
    }
    return "?";
}

namespace {

// q = φ g:  Q(q) ≥ (½ − ν0)∫φ²g′² − C0 rem ∫φ²g²
void factored_coercivity(const IntervalOperator& op, const std::string& lemma, double rem,
                         const std::vector<TrialFunction>& trials, std::vector<CheckEntry>& out) {
    const auto phi = ground_state(op.index(), op.r(), op.epsilon());
    for (const auto& t : trials) {
        const auto q = times(phi, t.values);
        const double lhs = op.quadratic_form(q);
        const double d = op.weighted_dirichlet(phi, t.values);
        const double w = op.l2(q);
        const double needed = std::max(0.0, ((0.5 - kNu0) * d - lhs) / (rem * w));
        const double rhs = (0.5 - kNu0) * d - kConstantCap * rem * w;
        out.push_back({lemma, t.name, lhs, rhs, (lhs - rhs) / (std::abs(lhs) + d + w), needed,
                       needed <= kConstantCap});
    }
}

}  // namespace

std::vector<CheckEntry> coercivity_check(CoercivityLemma lemma, double eps, const std::vector<TrialFunction>& trials,
                                         Discretization disc) {
    std::vector<CheckEntry> out;
    const std::string name = to_string(lemma);
    switch (lemma) {
        case CoercivityLemma::L23: {
            const double rem = std::max(std::exp(-kSqrt2 / eps), kRemainderFloor);
            factored_coercivity(IntervalOperator::standard(2, eps, Boundary::neumann, disc), name + "/q2", rem, trials,
                                out);
            factored_coercivity(IntervalOperator::standard(3, eps, Boundary::neumann, disc), name + "/q3", rem, trials,
                                out);
            break;
        }
        case CoercivityLemma::L1: {
            const double rem = std::max(std::exp(-2.0 * kSqrt2 / eps) / (eps * eps), kRemainderFloor);
            factored_coercivity(IntervalOperator::standard(1, eps, Boundary::neumann, disc), name, rem, trials, out);
            break;
        }
        case CoercivityLemma::L1out: {
            const auto op = IntervalOperator::standard(1, eps, Boundary::neumann, disc);
            const double rem = std::max(std::exp(-2.0 * kSqrt2 / eps) / (eps * eps), kRemainderFloor);
            const auto theta = ground_state(1, op.r(), eps);
            const double tt = op.l2(theta);
            for (const auto& t : trials) {
                const double mu = op.inner(theta, t.values) / tt;
                std::vector<double> qhat(t.values);
                for (std::size_t j = 0; j < qhat.size(); ++j) qhat[j] -= mu * theta[j];
                const double qq = op.l2(t.values);
                const double hh = op.l2(qhat);
                if (hh <= 1e-12 * qq) continue;
                const double lhs = op.quadratic_form(t.values) + rem * qq;
                const double c = eps * eps * lhs / hh;
                const double rhs = kOrthogonalBoundMin * hh / (eps * eps);
                out.push_back({name, t.name, lhs, rhs, (c - kOrthogonalBoundMin) / kOrthogonalBoundMin, c,
                               c >= kOrthogonalBoundMin});
            }
            break;
        }
    }
    return out;
}

std::vector<CheckEntry> endpoint_check(const IntervalOperator& op, const std::vector<TrialFunction>& trials) {
    std::vector<CheckEntry> out;
    const double eps = op.epsilon();
    for (const auto& t : trials) {
        const auto& q = t.values;
        const double form = op.quadratic_form(q);
        const double l2 = op.l2(q);
        if (op.index() == 1) {
            const double lhs = std::max(q.front() * q.front(), q.back() * q.back());
            const double denom = eps * (form + l2);
            const double c = denom > 0.0 ? lhs / denom : std::numeric_limits<double>::infinity();
            const double rhs = kConstantCap * std::max(denom, 0.0);
            out.push_back({"endpoint/L1", t.name, lhs, rhs, (rhs - lhs) / (rhs + lhs + 1e-300), c, c <= kConstantCap});
        } else {
            const double lhs = max_abs_sq(q);
            const double c = std::max(0.0, (lhs - kNu0 * form) / l2);
            const double rhs = kNu0 * form + kConstantCap * l2;
            out.push_back({"linf/L" + std::to_string(op.index()), t.name, lhs, rhs,
                           (rhs - lhs) / (std::abs(rhs) + lhs + 1e-300), c, c <= kConstantCap});
        }
    }
    return out;
}

std::vector<CheckEntry> product_estimate_check(ProductLemma lemma, double eps, const std::vector<TrialFunction>& trials) {
    const auto op = IntervalOperator::standard(2, eps);
    const auto& r = op.r();
    const double h = op.spacing();
    const std::size_t n = r.size();
    std::vector<double> w(n), wa(n), wb(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = s_eps(r[j], eps);
        const double om = one_minus_s_eps(r[j], eps);
        const double th = theta_eps(r[j], eps);
        switch (lemma) {
            case ProductLemma::P23: w[j] = th / eps; wa[j] = s * s; wb[j] = om * om; break;
            case ProductLemma::P34: w[j] = s * om * (2.0 * s - 1.0) / eps; wa[j] = om * om; wb[j] = 1.0; break;
            case ProductLemma::P24: w[j] = om * (1.0 - 2.0 * s) * s / eps; wa[j] = s * s; wb[j] = 1.0; break;
            case ProductLemma::P12: w[j] = s * s * (3.0 - 4.0 * s) * th / eps; wa[j] = th * th; wb[j] = s * s; break;
            case ProductLemma::P13: w[j] = om * om * (1.0 - 4.0 * s) * th / eps; wa[j] = th * th; wb[j] = om * om; break;
        }
    }
    const std::vector<std::pair<std::string, std::vector<double>>> multipliers = {
        {"1", std::vector<double>(n, 1.0)},
        {"r", r},
        {"cos(pi r)", sample(r, [](double x) { return std::cos(std::numbers::pi * x); })}};

    std::vector<std::vector<double>> deriv;
    deriv.reserve(trials.size());
    for (const auto& t : trials) deriv.push_back(quad::derivative(t.values, h));
    // per-trial weighted norms (a-side and b-side)
    std::vector<double> ia1(trials.size()), ia2(trials.size()), ib1(trials.size()), ib2(trials.size());
    for (std::size_t k = 0; k < trials.size(); ++k) {
        std::vector<double> g(n);
        const auto& f = trials[k].values;
        const auto& d = deriv[k];
        for (std::size_t j = 0; j < n; ++j) g[j] = wa[j] * f[j] * f[j];
        ia1[k] = quad::integrate(g, h);
        for (std::size_t j = 0; j < n; ++j) g[j] = wa[j] * d[j] * d[j];
        ia2[k] = quad::integrate(g, h);
        for (std::size_t j = 0; j < n; ++j) g[j] = wb[j] * f[j] * f[j];
        ib1[k] = quad::integrate(g, h);
        for (std::size_t j = 0; j < n; ++j) g[j] = wb[j] * d[j] * d[j];
        ib2[k] = quad::integrate(g, h);
    }

    std::vector<CheckEntry> out;
    const std::string name = to_string(lemma);
    std::vector<double> g(n);
    for (const auto& [aname, a] : multipliers) {
        for (std::size_t p = 0; p < trials.size(); ++p) {
            for (std::size_t q = 0; q < trials.size(); ++q) {
                const auto& fa = trials[p].values;
                const auto& fb = trials[q].values;
                for (std::size_t j = 0; j < n; ++j) g[j] = w[j] * fa[j] * fb[j] * a[j];
                const double lhs = std::abs(quad::integrate(g, h));
                const double i1 = ia1[p] + ib1[q];
                const double i2 = ia2[p] + ib2[q];
                const double c0 = i1 > 0.0 ? std::max(0.0, (lhs - kNu0 * i2) / i1)
                                           : (lhs > kNu0 * i2 ? std::numeric_limits<double>::infinity() : 0.0);
                const double rhs = kConstantCap * i1 + kNu0 * i2;
                out.push_back({name, trials[p].name + "," + trials[q].name + ",a=" + aname, lhs, rhs,
                               (rhs - lhs) / (rhs + lhs + 1e-300), c0, c0 <= kConstantCap});
            }
        }
    }
    return out;
}

double cubic_null_cancellation(const UnitVector& n, const Profile& q1, const Profile& q2, const Profile& q3) {
    if (q1.size() != q2.size() || q1.size() != q3.size()) throw DimensionError("cubic_null_cancellation: grids differ");
    const double h = q1.spacing();
    std::vector<double> g(q1.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        const SquareMatrix p0 = n.reflector(s_profile(q1.z()[j]));
        g[j] = frobenius(trilinear_Tf(p0, q1[j], q2[j]), q3[j]);
    }
    const SquareMatrix id = SquareMatrix::identity(n.dim());
    const double lim_minus = frobenius(trilinear_Tf(id, q1.limit_minus(), q2.limit_minus()), q3.limit_minus());
    const double lim_plus = frobenius(trilinear_Tf(n.reflector(), q1.limit_plus(), q2.limit_plus()), q3.limit_plus());
    const double scale = 1.0 + q1.limit_plus().norm() * q2.limit_plus().norm() * q3.limit_plus().norm() +
                         q1.limit_minus().norm() * q2.limit_minus().norm() * q3.limit_minus().norm();
    if (std::abs(lim_minus) > 1e-12 * scale || std::abs(lim_plus) > 1e-12 * scale)
        return std::numeric_limits<double>::infinity();
    return quad::integrate(g, h) + (g.front() + g.back()) / kSqrt2;
}

double bilinear_identity(const UnitVector& n, const SquareMatrix& e2, const SquareMatrix& e3, const SquareMatrix& e4,
                         const SquareMatrix& b1, const SquareMatrix& b2, const SquareMatrix& b3, const SquareMatrix& b4,
                         double s) {
    const std::array<std::pair<int, const SquareMatrix*>, 7> members = {
        {{2, &e2}, {3, &e3}, {4, &e4}, {1, &b1}, {2, &b2}, {3, &b3}, {4, &b4}}};
    for (const auto& [i, m] : members) {
        if ((project(i, *m, n) - *m).norm() > 1e-10 * (1.0 + m->norm()))
            throw DomainError("bilinear_identity: argument not in V" + std::to_string(i));
    }
    const SquareMatrix p0 = n.reflector(s);
    const SquareMatrix p1 = s * e2 + (1.0 - s) * e3 + e4;
    const SquareMatrix b = b1 + b2 + b3 + b4;
    const double lhs = frobenius(trilinear_Tf(p0, p1, b), b);
    auto sym = [](const SquareMatrix& x, const SquareMatrix& y) { return x * y + y * x; };
    const double rhs = 2.0 * s * frobenius(e2, (2.0 * s - 1.0) * sym(b3, b4) + (3.0 - 4.0 * s) * sym(b1, b2)) +
                       2.0 * (1.0 - s) * frobenius(e3, (1.0 - 4.0 * s) * sym(b1, b3) + (1.0 - 2.0 * s) * sym(b2, b4)) +
                       2.0 * (1.0 - 2.0 * s) * frobenius(e4, sym(b2, b3));
    return std::abs(lhs - rhs);
}

bool SpectralReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckEntry& c) { return c.pass; });
}

namespace {

// One row per lemma: the worst trial, with the verdict over all trials.
std::vector<CheckEntry> summarize(const std::vector<CheckEntry>& entries) {
    std::vector<CheckEntry> out;
    for (const auto& e : entries) {
        auto it = std::find_if(out.begin(), out.end(), [&](const CheckEntry& o) { return o.lemma == e.lemma; });
        if (it == out.end()) {
            out.push_back(e);
            continue;
        }
        const bool all = it->pass && e.pass;
        if (e.margin < it->margin) *it = e;
        it->pass = all;
    }
    return out;
}

}  // namespace

SpectralReport spectral_report(int op_index, double eps, std::size_t grid, std::uint64_t seed, std::size_t eigen_count) {
    const IntervalOperator op = grid == 0 ? IntervalOperator::standard(op_index, eps)
                                          : IntervalOperator(op_index, eps, grid);
    SpectralReport rep{op_index, eps, op.r().size(), {}, {}};
    const auto spec = eigen_smallest(op, eigen_count);
    rep.eigenvalues = spec.values;
    const auto trials = trial_family(op, seed);
    std::vector<CheckEntry> rows;
    auto append = [&rows](std::vector<CheckEntry> more) { rows.insert(rows.end(), more.begin(), more.end()); };

    switch (op_index) {
        case 1: {
            const double bound = std::exp(-1.0 / eps);
            const double rq = ground_state_rayleigh(op);
            const double certified = std::min(spec.values[0], rq);
            rows.push_back({"spectrum/L1-ground", "min(lambda1, R(theta))", certified, bound,
                            (bound - certified) / (std::abs(bound) + std::abs(certified)), spec.values[0],
                            certified <= bound});
            append(coercivity_check(CoercivityLemma::L1, eps, trials));
            append(coercivity_check(CoercivityLemma::L1out, eps, trials));
            append(endpoint_check(op, trials));
            append(product_estimate_check(ProductLemma::P12, eps, trials));
            append(product_estimate_check(ProductLemma::P13, eps, trials));
            break;
        }
        case 2:
        case 3: {
            const double floor_value = -1e-3;
            rows.push_back({"spectrum/L" + std::to_string(op_index) + "-min", "lambda_min", spec.values[0], floor_value,
                            spec.values[0] - floor_value, spec.values[0], spec.values[0] >= floor_value});
            append(coercivity_check(CoercivityLemma::L23, eps, trials));
            append(endpoint_check(op, trials));
            if (op_index == 2) {
                append(product_estimate_check(ProductLemma::P23, eps, trials));
                append(product_estimate_check(ProductLemma::P24, eps, trials));
            } else {
                append(product_estimate_check(ProductLemma::P34, eps, trials));
            }
            break;
        }
        default: append(endpoint_check(op, trials)); break;
    }
    rep.checks = summarize(rows);
    return rep;
}

}  // namespace macf
