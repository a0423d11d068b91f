#include "macf/odekit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macf/matcore.hpp"
#include "macf/quadrature.hpp"

namespace macf {

namespace {

enum class Weight { ds, s, one_minus_s, one };

Weight weight_for(int i) {
    switch (i) {
        case 1: return Weight::ds;
        case 2: return Weight::s;
        case 3: return Weight::one_minus_s;
        case 4: return Weight::one;
        default: throw DomainError("compatibility weight defined for i = 1..4 only");
    }
}

double weight(Weight w, double z) {
    switch (w) {
        case Weight::ds: return s_derivs(z).d1;
        case Weight::s: return s_profile(z);
        case Weight::one_minus_s: return s_profile(-z);
        case Weight::one: return 1.0;
    }
    return 0.0;
}

// ∫_{−∞}^{zl} w and ∫_{zr}^{∞} w; infinity where the weight does not decay.
double left_weight_tail(Weight w, double zl) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (w) {
        case Weight::ds: return s_profile(zl);
        case Weight::s: return std::log1p(std::exp(kSqrt2 * zl)) / kSqrt2;
        case Weight::one_minus_s:
        case Weight::one: return inf;
    }
    return inf;
}

double right_weight_tail(Weight w, double zr) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (w) {
        case Weight::ds: return s_profile(-zr);
        case Weight::one_minus_s: return std::log1p(std::exp(-kSqrt2 * zr)) / kSqrt2;
        case Weight::s:
        case Weight::one: return inf;
    }
    return inf;
}

// limit · ∫ w over the tail; a vanishing limit contributes nothing even when ∫ w diverges.
double tail_term(double limit, double weight_tail) {
    if (std::abs(limit) <= kCompatTol * 1e-3) return 0.0;
    return limit * weight_tail;
}

struct Grid {
    double h;
    std::size_t n;
    std::size_t j0;  // node closest to z = 0
    bool has_zero;
};

Grid grid_of(const std::vector<double>& z) {
    if (z.size() < 8) throw DomainError("odekit: grid needs at least 8 points");
    Grid g{quad::uniform_spacing(z), z.size(), 0, false};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (std::abs(z[j]) < best) {
            best = std::abs(z[j]);
            g.j0 = j;
        }
    }
    g.has_zero = best <= 1e-9 * g.h;
    if (g.j0 < 2 || g.j0 + 3 > z.size()) throw DomainError("odekit: grid must straddle z = 0");
    return g;
}

// Picks the right-anchored value for j ≥ j0 and the left-anchored one below.
std::vector<double> splice(const std::vector<double>& left, const std::vector<double>& right, std::size_t j0) {
    std::vector<double> out(right);
    std::copy(left.begin(), left.begin() + static_cast<std::ptrdiff_t>(j0), out.begin());
    return out;
}

std::vector<double> cumulative_trapezoid_from(const std::vector<double>& f, double h, std::size_t anchor) {
    std::vector<double> c(f.size(), 0.0);
    for (std::size_t j = anchor + 1; j < f.size(); ++j) c[j] = c[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
    for (std::size_t j = anchor; j-- > 0;) c[j] = c[j + 1] - 0.5 * h * (f[j] + f[j + 1]);
    return c;
}

double kappa_at(int i, double z) { return kappa(i, s_profile(z)); }

double interior_residual(int i, const std::vector<double>& z, const std::vector<double>& u,
                         const std::vector<double>& f, double h) {
    const auto d2 = quad::second_derivative(u, h);
    double r = 0.0;
    for (std::size_t j = 2; j + 2 < u.size(); ++j) r = std::max(r, std::abs(-d2[j] + kappa_at(i, z[j]) * u[j] - f[j]));
    return r;
}

}  // namespace

ConditionViolation::ConditionViolation(std::string condition, double value, const std::string& message)
    : DomainError("(" + condition + ") violated: " + message), condition_(std::move(condition)), value_(value) {}

double ScalarRhs::validate() const {
    if (z.size() != f.size()) throw DimensionError("ScalarRhs: z and f differ in length");
    quad::uniform_spacing(z);
    for (double v : f)
        if (!std::isfinite(v)) throw DomainError("ScalarRhs: non-finite sample");
    if (!std::isfinite(limit_minus) || !std::isfinite(limit_plus)) throw DomainError("ScalarRhs: non-finite limit");
    if (std::abs(f.front() - limit_minus) > 1e-6 * (1.0 + std::abs(limit_minus)))
        throw DomainError("ScalarRhs: left tail inconsistent with limit_minus");
    if (std::abs(f.back() - limit_plus) > 1e-6 * (1.0 + std::abs(limit_plus)))
        throw DomainError("ScalarRhs: right tail inconsistent with limit_plus");
    double c = 0.0;
    const std::size_t band = std::max<std::size_t>(1, z.size() / 10);
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (j >= band && j + band < z.size()) continue;
        const double lim = z[j] < 0.0 ? limit_minus : limit_plus;
        const double scale = std::pow(std::max(1.0, std::abs(z[j])), decay_class) *
                             std::min(s_profile(z[j]), s_profile(-z[j]));
        c = std::max(c, std::abs(f[j] - lim) / scale);
    }
    return c;
}

double check_compat(int i, const ScalarRhs& rhs) {
    const Weight w = weight_for(i);
    const double h = quad::uniform_spacing(rhs.z);
    std::vector<double> g(rhs.f.size());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = rhs.f[j] * weight(w, rhs.z[j]);
    return quad::integrate(g, h) + tail_term(rhs.limit_minus, left_weight_tail(w, rhs.z.front())) +
           tail_term(rhs.limit_plus, right_weight_tail(w, rhs.z.back()));
}

double l4_jump(const ScalarRhs& rhs) {
    const Grid g = grid_of(rhs.z);
    const auto& f = rhs.f;
    const std::size_t last = g.n - 1;
    auto kr = quad::cumulative_from_right(f, g.h);
    auto kl = quad::cumulative_from_left(f, g.h);
    for (auto& v : kr) v += f[last] / kSqrt2;
    for (auto& v : kl) v = -(v + f[0] / kSqrt2);
    const auto k = splice(kl, kr, g.j0);
    return quad::integrate(k, g.h) + (k.front() + k.back()) / kSqrt2;
}

ScalarSolution solve_scalar(int i, const ScalarRhs& rhs, double datum) {
    if (i < 1 || i > 5) throw DomainError("solve_scalar: i must be in 1..5");
    rhs.validate();
    const Grid g = grid_of(rhs.z);
    const auto& z = rhs.z;
    const auto& f = rhs.f;
    const std::size_t n = g.n;
    const std::size_t last = n - 1;
    const double h = g.h;

    ScalarSolution sol{std::vector<double>(n, 0.0), 0.0, 0.0, 0.0, 0.0, 0.0};
    if (i <= 4) {
        sol.compat = check_compat(i, rhs);
        if (!(std::abs(sol.compat) <= kCompatTol))
            throw ConditionViolation("compat", sol.compat,
                                     "solve_scalar(" + std::to_string(i) +
                                         "): weighted integral of f = " + std::to_string(sol.compat));
    }

    std::vector<double> prefactor(n);
    std::vector<double> outer_integrand(n);
    std::vector<double> outer;
    std::vector<double> outer_trap;

    switch (i) {
        case 1: {
            if (!g.has_zero) throw DomainError("solve_scalar(1): grid must contain z = 0");
            std::vector<double> gw(n);
            for (std::size_t j = 0; j < n; ++j) gw[j] = f[j] * s_derivs(z[j]).d1;
            auto ir = quad::cumulative_from_right(gw, h);
            auto il = quad::cumulative_from_left(gw, h);
            for (auto& v : ir) v += rhs.limit_plus * s_profile(-z[last]);
            for (auto& v : il) v = -(v + rhs.limit_minus * s_profile(z[0]));
            const auto inner = splice(il, ir, g.j0);
            for (std::size_t j = 0; j < n; ++j) {
                const double ds = s_derivs(z[j]).d1;
                prefactor[j] = ds;
                outer_integrand[j] = inner[j] / (ds * ds);
            }
            outer = quad::cumulative_from(outer_integrand, h, g.j0);
            outer_trap = cumulative_trapezoid_from(outer_integrand, h, g.j0);
            const double ds0 = s_derivs(0.0).d1;
            for (std::size_t j = 0; j < n; ++j) sol.u[j] = datum * prefactor[j] / ds0 + prefactor[j] * outer[j];
            sol.limit_minus = 0.5 * rhs.limit_minus;
            sol.limit_plus = 0.5 * rhs.limit_plus;
            break;
        }
        case 2: {
            std::vector<double> gw(n);
            for (std::size_t j = 0; j < n; ++j) gw[j] = f[j] * s_profile(z[j]);
            auto ir = quad::cumulative_from_right(gw, h);
            auto il = quad::cumulative_from_left(gw, h);
            for (auto& v : ir) v += gw[last] / kSqrt2;
            for (auto& v : il) v = -(v + tail_term(rhs.limit_minus, left_weight_tail(Weight::s, z[0])));
            const auto inner = splice(il, ir, g.j0);
            for (std::size_t j = 0; j < n; ++j) {
                const double s = s_profile(z[j]);
                prefactor[j] = s;
                outer_integrand[j] = inner[j] / (s * s);
            }
            outer = quad::cumulative_from_right(outer_integrand, h);
            outer_trap = cumulative_trapezoid_from(outer_integrand, h, last);
            for (auto& v : outer_trap) v = -v;
            const double tail = outer_integrand[last] / kSqrt2;
            for (std::size_t j = 0; j < n; ++j) {
                outer[j] += tail;
                outer_trap[j] += tail;
                sol.u[j] = prefactor[j] * (datum - outer[j]);
            }
            sol.limit_minus = 0.5 * rhs.limit_minus;
            sol.limit_plus = datum;
            break;
        }
        case 3: {
            std::vector<double> gw(n);
            for (std::size_t j = 0; j < n; ++j) gw[j] = f[j] * s_profile(-z[j]);
            auto jl = quad::cumulative_from_left(gw, h);
            auto jr = quad::cumulative_from_right(gw, h);
            for (auto& v : jl) v += gw[0] / kSqrt2;
            for (auto& v : jr) v = -(v + tail_term(rhs.limit_plus, right_weight_tail(Weight::one_minus_s, z[last])));
            // left-anchored values up to and including j0, right-anchored beyond
            std::vector<double> inner(jl);
            std::copy(jr.begin() + static_cast<std::ptrdiff_t>(g.j0 + 1), jr.end(),
                      inner.begin() + static_cast<std::ptrdiff_t>(g.j0 + 1));
            for (std::size_t j = 0; j < n; ++j) {
                const double om = s_profile(-z[j]);
                prefactor[j] = om;
                outer_integrand[j] = inner[j] / (om * om);
            }
            outer = quad::cumulative_from_left(outer_integrand, h);
            outer_trap = cumulative_trapezoid_from(outer_integrand, h, 0);
            const double tail = outer_integrand[0] / kSqrt2;
            for (std::size_t j = 0; j < n; ++j) {
                outer[j] += tail;
                outer_trap[j] += tail;
                sol.u[j] = prefactor[j] * (datum - outer[j]);
            }
            sol.limit_minus = datum;
            sol.limit_plus = 0.5 * rhs.limit_plus;
            break;
        }
        case 4: {
            auto kr = quad::cumulative_from_right(f, h);
            auto kl = quad::cumulative_from_left(f, h);
            for (auto& v : kr) v += f[last] / kSqrt2;
            for (auto& v : kl) v = -(v + f[0] / kSqrt2);
            const auto k = splice(kl, kr, g.j0);
            outer_integrand = k;
            outer = quad::cumulative_from_right(k, h);
            outer_trap = cumulative_trapezoid_from(k, h, last);
            for (auto& v : outer_trap) v = -v;
            const double tail = k[last] / kSqrt2;
            for (std::size_t j = 0; j < n; ++j) {
                prefactor[j] = 1.0;
                outer[j] += tail;
                outer_trap[j] += tail;
                sol.u[j] = datum - outer[j];
            }
            sol.limit_plus = datum;
            sol.limit_minus = datum - (outer[0] + k[0] / kSqrt2);
            break;
        }
        case 5: {
            std::vector<double> gl(n);
            std::vector<double> gr(n);
            for (std::size_t j = 0; j < n; ++j) {
                gl[j] = std::exp(kSqrt2 * z[j]) * f[j];
                gr[j] = std::exp(-kSqrt2 * z[j]) * f[j];
            }
            auto cl = quad::cumulative_from_left(gl, h);
            auto cr = quad::cumulative_from_right(gr, h);
            const double tl = rhs.limit_minus * std::exp(kSqrt2 * z[0]) / kSqrt2;
            const double tr = rhs.limit_plus * std::exp(-kSqrt2 * z[last]) / kSqrt2;
            const double c = 1.0 / (2.0 * kSqrt2);
            for (std::size_t j = 0; j < n; ++j)
                sol.u[j] = c * (std::exp(-kSqrt2 * z[j]) * (cl[j] + tl) + std::exp(kSqrt2 * z[j]) * (cr[j] + tr));
            sol.limit_minus = 0.5 * rhs.limit_minus;
            sol.limit_plus = 0.5 * rhs.limit_plus;
            break;
        }
    }

    if (!outer.empty()) {
        for (std::size_t j = 0; j < n; ++j)
            sol.richardson = std::max(sol.richardson, std::abs(prefactor[j] * (outer[j] - outer_trap[j])));
    }
    for (double v : sol.u)
        if (!std::isfinite(v)) throw DomainError("solve_scalar: non-finite solution (grid too wide?)");
    sol.residual = interior_residual(i, z, sol.u, f, h);
    return sol;
}

std::vector<Profile> null_basis(const UnitVector& n, const std::array<std::vector<SquareMatrix>, 4>& bases,
                                const std::vector<double>& z) {
    std::vector<Profile> out;
    for (int i = 1; i <= 4; ++i) {
        for (const auto& e : bases[static_cast<std::size_t>(i - 1)]) {
            if (e.dim() != n.dim()) throw DimensionError("null_basis: basis element has wrong size");
            std::vector<SquareMatrix> samples;
            samples.reserve(z.size());
            for (double zj : z) {
                const SDerivs d = s_derivs(zj);
                const double c = i == 1 ? d.d1 : i == 2 ? d.s : i == 3 ? d.one_minus_s : 1.0;
                samples.push_back(c * e);
            }
            const SquareMatrix zero = SquareMatrix::zero(n.dim());
            const SquareMatrix lm = (i == 4 || i == 3) ? e : zero;
            const SquareMatrix lp = (i == 4 || i == 2) ? e : zero;
            out.emplace_back(z, std::move(samples), lm, lp);
        }
    }
    return out;
}

std::vector<Profile> null_basis(const UnitVector& n, const std::vector<double>& z) {
    std::array<std::vector<SquareMatrix>, 4> bases;
    for (int i = 1; i <= 4; ++i) bases[static_cast<std::size_t>(i - 1)] = subspace_basis(i, n);
    return null_basis(n, bases, z);
}

Profile apply_L(const Profile& p, const UnitVector& n) {
    const double h = p.spacing();
    const std::size_t len = p.size();
    if (len < 4) throw DomainError("apply_L: need at least 4 samples");
    const double h2 = h * h;
    std::vector<SquareMatrix> out;
    out.reserve(len);
    for (std::size_t j = 0; j < len; ++j) {
        SquareMatrix d2(p.dim());
        if (j == 0) {
            d2 = (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * (1.0 / h2);
        } else if (j + 1 == len) {
            d2 = (2.0 * p[len - 1] - 5.0 * p[len - 2] + 4.0 * p[len - 3] - p[len - 4]) * (1.0 / h2);
        } else {
            d2 = (p[j - 1] - 2.0 * p[j] + p[j + 1]) * (1.0 / h2);
        }
        const SquareMatrix p0 = n.reflector(s_profile(p.z()[j]));
        out.push_back(linearized_H(p0, p[j]) - d2);
    }
    const SquareMatrix lm = linearized_H(SquareMatrix::identity(p.dim()), p.limit_minus());
    const SquareMatrix lp = linearized_H(n.reflector(), p.limit_plus());
    return Profile(p.z(), std::move(out), lm, lp, p.decay_rate());
}

std::vector<ConditionReport> check_conditions(const MatrixRhs& rhs) {
    const Profile& f = rhs.f;
    const UnitVector& n = rhs.direction;
    if (n.dim() != f.dim()) throw DimensionError("MatrixRhs: direction has wrong length");
    std::vector<ConditionReport> out;
    const double b1 = std::max((f.samples().front() - f.limit_minus()).max_abs(),
                               (f.samples().back() - f.limit_plus()).max_abs());
    out.push_back({"B1", b1, 1e-6});
    out.push_back({"B2", project(2, f.limit_plus(), n).norm(), kCompatTol});
    out.push_back({"B3", project(3, f.limit_minus(), n).norm(), kCompatTol});
    out.push_back({"B4", std::max(project(4, f.limit_minus(), n).norm(), project(4, f.limit_plus(), n).norm()),
                   kCompatTol});
    const std::size_t dim = f.dim();
    for (int i = 1; i <= 4; ++i) {
        double sq = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                ScalarRhs s;
                s.z = f.z();
                s.f.resize(f.size());
                for (std::size_t j = 0; j < f.size(); ++j) s.f[j] = project(i, f[j], n)(r, c);
                s.limit_minus = project(i, f.limit_minus(), n)(r, c);
                s.limit_plus = project(i, f.limit_plus(), n)(r, c);
                const double v = check_compat(i, s);
                sq += v * v;
            }
        }
        out.push_back({"O" + std::to_string(i), std::sqrt(sq), kCompatTol});
    }
    return out;
}

MatrixSolution solve_matrix(const MatrixRhs& rhs) {
    for (const auto& c : check_conditions(rhs)) {
        if (!c.pass())
            throw ConditionViolation(c.condition, c.value,
                                     "measured " + std::to_string(c.value) + " > " + std::to_string(c.tolerance));
    }
    const Profile& f = rhs.f;
    const UnitVector& n = rhs.direction;
    const std::size_t dim = f.dim();
    const std::size_t len = f.size();

    std::vector<SquareMatrix> p(len, SquareMatrix::zero(dim));
    SquareMatrix p_minus = SquareMatrix::zero(dim);
    SquareMatrix p_plus = SquareMatrix::zero(dim);
    SquareMatrix q_bar = SquareMatrix::zero(dim);
    double scalar_residual = 0.0;

    for (int i = 1; i <= 5; ++i) {
        std::vector<SquareMatrix> comp;
        comp.reserve(len);
        for (std::size_t j = 0; j < len; ++j) comp.push_back(project(i, f[j], n));
        const SquareMatrix lm = project(i, f.limit_minus(), n);
        const SquareMatrix lp = project(i, f.limit_plus(), n);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                ScalarRhs s;
                s.z = f.z();
                s.f.resize(len);
                double peak = std::max(std::abs(lm(r, c)), std::abs(lp(r, c)));
                for (std::size_t j = 0; j < len; ++j) {
                    s.f[j] = comp[j](r, c);
                    peak = std::max(peak, std::abs(s.f[j]));
                }
                if (peak == 0.0) continue;
                s.limit_minus = lm(r, c);
                s.limit_plus = lp(r, c);
                const double datum = i == 4 ? l4_jump(s) : 0.0;
                const ScalarSolution u = solve_scalar(i, s, datum);
                for (std::size_t j = 0; j < len; ++j) p[j](r, c) += u.u[j];
                p_minus(r, c) += u.limit_minus;
                p_plus(r, c) += u.limit_plus;
                if (i == 4) q_bar(r, c) = u.limit_plus;
                scalar_residual = std::max(scalar_residual, u.residual);
            }
        }
    }

    Profile sol(f.z(), std::move(p), p_minus, p_plus, f.decay_rate());
    const Profile lp = apply_L(sol, n);
    double residual = 0.0;
    for (std::size_t j = 1; j + 1 < len; ++j) residual = std::max(residual, (lp[j] - f[j]).max_abs());
    return MatrixSolution{std::move(sol), q_bar, residual, scalar_residual};
}

}  // namespace macf
