#include "macf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "macf/matcore.hpp"
#include "macf/orbit.hpp"
#include "macf/periodic_fft.hpp"
#include "macf/rng.hpp"

namespace macf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t wrap_index(long i, std::size_t n) {
    const long nn = static_cast<long>(n);
    return static_cast<std::size_t>(((i % nn) + nn) % nn);
}

double wrap_delta(double d, double length) { return d - length * std::round(d / length); }

// f(A) = A AᵀA − A for one cell, a and out row-major n×n.
void reaction(const double* a, double* out, std::size_t n) {
    double ata[64];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += a[r * n + i] * a[r * n + j];
            ata[i * n + j] = acc;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += a[i * n + r] * ata[r * n + j];
            out[i * n + j] = acc - a[i * n + j];
        }
    }
}

// ‖AᵀA − I‖_F² for one cell.
double gram_defect_sq(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double g = 0.0;
            for (std::size_t r = 0; r < n; ++r) g += a[r * n + i] * a[r * n + j];
            if (i == j) g -= 1.0;
            acc += g * g;
        }
    }
    return acc;
}

double small_det(const double* a, std::size_t n) {
    if (n == 2) return a[0] * a[3] - a[1] * a[2];
    if (n == 3)
        return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
               a[2] * (a[3] * a[7] - a[4] * a[6]);
    RowMajorMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::copy(a, a + n * n, m.data());
    return m.determinant();
}

void gather(const MatrixField& f, std::size_t k, double* out) {
    const std::size_t nn = f.n() * f.n();
    const std::size_t cells = f.grid().cells();
    const auto& v = f.values();
    for (std::size_t c = 0; c < nn; ++c) out[c] = v[c * cells + k];
}

SquareMatrix rotation(std::size_t n, std::size_t a, std::size_t b, double angle) {
    SquareMatrix r = SquareMatrix::identity(n);
    r(a, a) = std::cos(angle);
    r(a, b) = -std::sin(angle);
    r(b, a) = std::sin(angle);
    r(b, b) = std::cos(angle);
    return r;
}

std::array<std::size_t, 2> phase_plane(std::size_t n) { return n == 2 ? std::array<std::size_t, 2>{0, 1} : std::array<std::size_t, 2>{1, 2}; }

}  // namespace

// --- grid and field -----------------------------------------------------

PeriodicGrid::PeriodicGrid(int m, std::array<std::size_t, 2> sizes, std::array<double, 2> lengths)
    : m_(m), sizes_(sizes), lengths_(lengths), cells_(0) {
    if (m != 1 && m != 2) throw DomainError("PeriodicGrid: m must be 1 or 2");
    if (m == 1) {
        sizes_[1] = 1;
        lengths_[1] = 1.0;
    }
    for (int a = 0; a < m; ++a) {
        if (sizes_[static_cast<std::size_t>(a)] < 16) throw DomainError("PeriodicGrid: need at least 16 points per axis");
        if (!(lengths_[static_cast<std::size_t>(a)] > 0.0)) throw DomainError("PeriodicGrid: lengths must be positive");
    }
    cells_ = sizes_[0] * sizes_[1];
}

double PeriodicGrid::max_spacing() const { return m_ == 1 ? spacing(0) : std::max(spacing(0), spacing(1)); }

double PeriodicGrid::cell_volume() const { return m_ == 1 ? spacing(0) : spacing(0) * spacing(1); }

std::array<double, 2> PeriodicGrid::position(std::size_t k) const {
    const std::size_t ix = k % sizes_[0];
    const std::size_t iy = k / sizes_[0];
    return {static_cast<double>(ix) * spacing(0), m_ == 1 ? 0.0 : static_cast<double>(iy) * spacing(1)};
}

std::vector<std::size_t> PeriodicGrid::fft_sizes() const {
    if (m_ == 1) return {sizes_[0]};
    return {sizes_[1], sizes_[0]};
}

MatrixField::MatrixField(PeriodicGrid grid, std::size_t n, double time)
    : grid_(grid), n_(n), time_(time), values_(grid.cells() * n * n, 0.0) {
    if (n < 2 || n > 8) throw DomainError("MatrixField: n must be in 2..8");
}

SquareMatrix MatrixField::at(std::size_t k) const {
    SquareMatrix a(n_);
    auto out = a.row_major();
    const std::size_t cells = grid_.cells();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = values_[c * cells + k];
    return a;
}

void MatrixField::set(std::size_t k, const SquareMatrix& a) {
    if (a.dim() != n_) throw DimensionError("MatrixField::set: wrong matrix dimension");
    const auto in = a.row_major();
    const std::size_t cells = grid_.cells();
    for (std::size_t c = 0; c < in.size(); ++c) values_[c * cells + k] = in[c];
}

SquareMatrix MatrixField::interpolate(std::array<double, 2> x) const {
    const std::size_t nn = n_ * n_;
    const std::size_t cells = grid_.cells();
    SquareMatrix out(n_);
    auto o = out.row_major();
    const double ux = x[0] / grid_.spacing(0);
    const double fx = std::floor(ux);
    const double tx = ux - fx;
    const std::size_t ix0 = wrap_index(static_cast<long>(fx), grid_.size(0));
    const std::size_t ix1 = (ix0 + 1) % grid_.size(0);
    if (grid_.m() == 1) {
        for (std::size_t c = 0; c < nn; ++c)
            o[c] = (1.0 - tx) * values_[c * cells + ix0] + tx * values_[c * cells + ix1];
        return out;
    }
    const double uy = x[1] / grid_.spacing(1);
    const double fy = std::floor(uy);
    const double ty = uy - fy;
    const std::size_t iy0 = wrap_index(static_cast<long>(fy), grid_.size(1));
    const std::size_t iy1 = (iy0 + 1) % grid_.size(1);
    const std::size_t k00 = grid_.index(ix0, iy0), k10 = grid_.index(ix1, iy0);
    const std::size_t k01 = grid_.index(ix0, iy1), k11 = grid_.index(ix1, iy1);
    for (std::size_t c = 0; c < nn; ++c) {
        const double* v = values_.data() + c * cells;
        o[c] = (1.0 - ty) * ((1.0 - tx) * v[k00] + tx * v[k10]) + ty * ((1.0 - tx) * v[k01] + tx * v[k11]);
    }
    return out;
}

bool MatrixField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> MatrixField::determinants() const {
    std::vector<double> d(grid_.cells());
    double a[64];
    for (std::size_t k = 0; k < d.size(); ++k) {
        gather(*this, k, a);
        d[k] = small_det(a, n_);
    }
    return d;
}

// --- configuration --------------------------------------------------------

double RunConfig::time_step() const { return dt > 0.0 ? dt : kStabilityFactor * epsilon * epsilon; }

std::size_t RunConfig::total_steps() const {
    return static_cast<std::size_t>(std::ceil(t_end / time_step() - 1e-9));
}

PeriodicGrid RunConfig::make_grid() const { return PeriodicGrid(m, {grid, grid}, {length, length}); }

void RunConfig::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (n < 2 || n > 8) throw ConfigError("n must be in 2..8");
    if (m != 1 && m != 2) throw ConfigError("m must be 1 or 2");
    if (grid < 16) throw ConfigError("grid must be at least 16");
    if (!(length > 0.0)) throw ConfigError("length must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
    if (diag_stride == 0) throw ConfigError("diag_stride must be positive");
    const double h = length / static_cast<double>(grid);
    if (h > 0.25 * epsilon * (1.0 + 1e-12))
        throw ConfigError("grid spacing " + std::to_string(h) + " exceeds eps/4; refine the grid");
    const double step = time_step();
    if (!(step > 0.0) || step > kStabilityFactor * epsilon * epsilon * (1.0 + 1e-12))
        throw ConfigError("dt must be positive and at most 0.1*eps^2");
    if (scheme == Scheme::explicit_euler && step > h * h / (4.0 * m) * (1.0 + 1e-12))
        throw ConfigError("explicit scheme requires dt <= h^2/(4m)");
    if (init == InitKind::circle) {
        if (m != 2) throw ConfigError("circle initial data needs m = 2");
        if (!(radius > kCollarWidth * epsilon)) throw ConfigError("circle radius must exceed the 6*eps collar");
        if (radius + kProbeDistance * epsilon >= 0.5 * length) throw ConfigError("circle radius too large for the torus");
    }
    if (init == InitKind::flat && kCollarWidth * epsilon >= 0.25 * length)
        throw ConfigError("flat interfaces closer than the collar width");
    if (init == InitKind::file && init_file.empty()) throw ConfigError("init.kind = file needs init.file");
    if (twist != 0.0) {
        if (n < 3) throw ConfigError("init.twist needs n >= 3 (every n = 2 pair is minimal)");
        if (std::abs(twist) >= std::numbers::pi - 1e-3) throw ConfigError("init.twist must lie in (-pi, pi)");
    }
    if (!(noise >= 0.0)) throw ConfigError("init.noise must be nonnegative");
}

// --- initial data ---------------------------------------------------------

SquareMatrix bulk_phase(const RunConfig& cfg, std::array<double, 2> x) {
    const double w = 2.0 * std::numbers::pi / cfg.length;
    const double alpha = cfg.phase * std::sin(w * x[0]) * (cfg.m == 2 ? std::cos(w * x[1]) : 1.0);
    const auto [a, b] = phase_plane(cfg.n);
    return rotation(cfg.n, a, b, alpha);
}

double signed_distance(const RunConfig& cfg, std::array<double, 2> x) {
    const double l = cfg.length;
    if (cfg.init == InitKind::circle) {
        const double dx = wrap_delta(x[0] - 0.5 * l, l);
        const double dy = wrap_delta(x[1] - 0.5 * l, l);
        return std::hypot(dx, dy) - cfg.radius;
    }
    const double c = cfg.m == 1 ? x[0] : x[1];
    return 0.25 * l - std::abs(wrap_delta(c - 0.5 * l, l));
}

MatrixField init_well_prepared(const RunConfig& cfg) {
    cfg.validate();
    const PeriodicGrid grid = cfg.make_grid();
    if (cfg.init == InitKind::file) {
        MatrixField f = read_snapshot(cfg.init_file, {cfg.length, cfg.length});
        if (f.n() != cfg.n || !(f.grid() == grid)) throw ConfigError("init.file does not match n/m/grid of the config");
        f.set_time(0.0);
        return f;
    }
    MatrixField field(grid, cfg.n);
    const UnitVector dir = UnitVector::basis(cfg.n, 0);
    const SquareMatrix householder = dir.reflector();
    const auto [pa, pb] = phase_plane(cfg.n);
    const SquareMatrix twist = rotation(cfg.n, pa, pb, cfg.twist);
    for (std::size_t k = 0; k < grid.cells(); ++k) {
        const auto x = grid.position(k);
        const double z = signed_distance(cfg, x) / cfg.epsilon;
        const SquareMatrix a_plus = bulk_phase(cfg, x);
        const SquareMatrix a_minus = a_plus * householder * twist;
        const double s = s_profile(z);
        if (cfg.twist == 0.0) {
            field.set(k, s * a_plus + s_profile(-z) * a_minus);
        } else {
            // Θ = Φ̄(s) (I − 2s nnᵀ), Φ̄ the O⁻ geodesic from A− to A+(I − 2nnᵀ)
            const Geodesic geo(a_minus, a_plus * householder);
            field.set(k, geo.at(s) * dir.reflector(s));
        }
    }
    if (cfg.noise > 0.0) {
        Rng rng(cfg.seed);
        for (double& v : field.values()) v += cfg.noise * rng.uniform(-1.0, 1.0);
    }
    return field;
}

// --- time stepping --------------------------------------------------------

struct Stepper::Impl {
    RunConfig cfg;
    PeriodicGrid grid;
    double dt;
    std::optional<PeriodicFFT> fft;
    std::vector<double> symbol;
    std::vector<double> rhs;
    std::vector<double> lap;

    Impl(const RunConfig& c, const PeriodicGrid& g) : cfg(c), grid(g), dt(c.time_step()) {}
};

Stepper::Stepper(const RunConfig& cfg, const PeriodicGrid& grid) : impl_(std::make_unique<Impl>(cfg, grid)) {
    auto& im = *impl_;
    im.rhs.resize(grid.cells() * cfg.n * cfg.n);
    if (cfg.scheme == Scheme::semi_implicit) {
        im.fft.emplace(grid.fft_sizes());
        im.symbol.resize(im.fft->spectral_size());
        for (std::size_t c = 0; c < im.symbol.size(); ++c) {
            const auto k = im.fft->wavenumbers(c);
            double lambda = 0.0;
            // k = {kx} or {ky, kx}
            const double kx = static_cast<double>(k.back());
            const double sx = std::sin(std::numbers::pi * kx / static_cast<double>(grid.size(0)));
            lambda -= 4.0 / (grid.spacing(0) * grid.spacing(0)) * sx * sx;
            if (grid.m() == 2) {
                const double ky = static_cast<double>(k.front());
                const double sy = std::sin(std::numbers::pi * ky / static_cast<double>(grid.size(1)));
                lambda -= 4.0 / (grid.spacing(1) * grid.spacing(1)) * sy * sy;
            }
            im.symbol[c] = 1.0 / (1.0 - im.dt * lambda);
        }
    } else {
        im.lap.resize(grid.cells());
    }
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

namespace {

void laplacian(std::span<const double> u, const PeriodicGrid& g, std::vector<double>& out) {
    const std::size_t nx = g.size(0), ny = g.size(1);
    const double ix2 = 1.0 / (g.spacing(0) * g.spacing(0));
    const double iy2 = g.m() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t k = g.index(ix, iy);
            const double c = u[k];
            double l = (u[g.index((ix + 1) % nx, iy)] - 2.0 * c + u[g.index((ix + nx - 1) % nx, iy)]) * ix2;
            if (g.m() == 2) l += (u[g.index(ix, (iy + 1) % ny)] - 2.0 * c + u[g.index(ix, (iy + ny - 1) % ny)]) * iy2;
            out[k] = l;
        }
    }
}

}  // namespace

void Stepper::step(MatrixField& field, std::size_t step_index) {
    auto& im = *impl_;
    if (field.n() != im.cfg.n || !(field.grid() == im.grid)) throw DimensionError("Stepper: field does not match config");
    const std::size_t n = field.n();
    const std::size_t nn = n * n;
    const std::size_t cells = im.grid.cells();
    auto& v = field.values();
    const double k = im.dt / (im.cfg.epsilon * im.cfg.epsilon);
    double a[64], fa[64];
    for (std::size_t cell = 0; cell < cells; ++cell) {
        for (std::size_t c = 0; c < nn; ++c) a[c] = v[c * cells + cell];
        reaction(a, fa, n);
        for (std::size_t c = 0; c < nn; ++c) im.rhs[c * cells + cell] = a[c] - k * fa[c];
    }
    for (std::size_t c = 0; c < nn; ++c) {
        std::span<double> out(v.data() + c * cells, cells);
        std::span<double> r(im.rhs.data() + c * cells, cells);
        if (im.fft) {
            im.fft->apply_multiplier(r, im.symbol);
            std::copy(r.begin(), r.end(), out.begin());
        } else {
            laplacian(out, im.grid, im.lap);
            for (std::size_t j = 0; j < cells; ++j) out[j] = r[j] + im.dt * im.lap[j];
        }
    }
    field.set_time(static_cast<double>(step_index + 1) * im.dt);
    if (!field.all_finite()) throw SimulationError(step_index + 1, "non-finite field values (unstable time step?)");
}

MatrixField step(const MatrixField& field, const RunConfig& cfg) {
    Stepper stepper(cfg, field.grid());
    MatrixField out = field;
    const auto index = static_cast<std::size_t>(std::llround(field.time() / cfg.time_step()));
    stepper.step(out, index);
    return out;
}

double energy(const MatrixField& field, double epsilon) {
    const auto& g = field.grid();
    const std::size_t n = field.n();
    const std::size_t nn = n * n;
    const std::size_t nx = g.size(0), ny = g.size(1);
    double grad = 0.0;
    for (std::size_t c = 0; c < nn; ++c) {
        const auto u = field.component(c);
        for (std::size_t iy = 0; iy < ny; ++iy) {
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const double center = u[g.index(ix, iy)];
                const double dx = (u[g.index((ix + 1) % nx, iy)] - center) / g.spacing(0);
                grad += dx * dx;
                if (g.m() == 2) {
                    const double dy = (u[g.index(ix, (iy + 1) % ny)] - center) / g.spacing(1);
                    grad += dy * dy;
                }
            }
        }
    }
    double pot = 0.0;
    double a[64];
    for (std::size_t k = 0; k < g.cells(); ++k) {
        gather(field, k, a);
        pot += 0.25 * gram_defect_sq(a, n);
    }
    return g.cell_volume() * (0.5 * grad + pot / (epsilon * epsilon));
}

// --- interface ------------------------------------------------------------

Interface extract_interface(const MatrixField& field) {
    const auto& g = field.grid();
    const auto det = field.determinants();
    const std::size_t nx = g.size(0), ny = g.size(1);
    Interface out;
    auto crossing = [&](std::size_t k0, std::size_t k1) -> std::optional<double> {
        const bool p0 = det[k0] > 0.0, p1 = det[k1] > 0.0;
        if (p0 == p1) return std::nullopt;
        const double d = det[k0] - det[k1];
        return d != 0.0 ? det[k0] / d : 0.5;
    };
    if (g.m() == 1) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            if (auto t = crossing(ix, (ix + 1) % nx)) {
                double x = (static_cast<double>(ix) + *t) * g.spacing(0);
                if (x >= g.length(0)) x -= g.length(0);
                out.points.push_back({x, 0.0});
            }
        }
        out.measure = static_cast<double>(out.points.size());
        out.empty = out.points.empty();
        return out;
    }
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> hedge(g.cells(), kNone), vedge(g.cells(), kNone);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t k = g.index(ix, iy);
            if (auto t = crossing(k, g.index((ix + 1) % nx, iy))) {
                double x = (static_cast<double>(ix) + *t) * g.spacing(0);
                if (x >= g.length(0)) x -= g.length(0);
                hedge[k] = out.points.size();
                out.points.push_back({x, static_cast<double>(iy) * g.spacing(1)});
            }
            if (auto t = crossing(k, g.index(ix, (iy + 1) % ny))) {
                double y = (static_cast<double>(iy) + *t) * g.spacing(1);
                if (y >= g.length(1)) y -= g.length(1);
                vedge[k] = out.points.size();
                out.points.push_back({static_cast<double>(ix) * g.spacing(0), y});
            }
        }
    }
    auto seg_length = [&](std::size_t a, std::size_t b) {
        const double dx = wrap_delta(out.points[b][0] - out.points[a][0], g.length(0));
        const double dy = wrap_delta(out.points[b][1] - out.points[a][1], g.length(1));
        return std::hypot(dx, dy);
    };
    auto add = [&](std::size_t a, std::size_t b) {
        out.segments.push_back({a, b});
        out.measure += seg_length(a, b);
    };
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t x1 = (ix + 1) % nx, y1 = (iy + 1) % ny;
            const std::size_t bottom = hedge[g.index(ix, iy)], top = hedge[g.index(ix, y1)];
            const std::size_t left = vedge[g.index(ix, iy)], right = vedge[g.index(x1, iy)];
            std::vector<std::size_t> e;
            for (auto p : {bottom, right, top, left})
                if (p != kNone) e.push_back(p);
            if (e.size() == 2) {
                add(e[0], e[1]);
            } else if (e.size() == 4) {
                const double c0 = det[g.index(ix, iy)];
                const double center =
                    0.25 * (c0 + det[g.index(x1, iy)] + det[g.index(x1, y1)] + det[g.index(ix, y1)]);
                if ((center > 0.0) == (c0 > 0.0)) {
                    add(bottom, right);
                    add(top, left);
                } else {
                    add(bottom, left);
                    add(top, right);
                }
            }
        }
    }
    out.empty = out.points.empty();
    return out;
}

CircleFit fit_circle(const std::vector<std::array<double, 2>>& points) {
    if (points.size() < 3) throw DomainError("fit_circle: need at least 3 points");
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p[0];
        my += p[1];
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    Eigen::MatrixXd a(static_cast<Eigen::Index>(points.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i][0] - mx, y = points[i][1] - my;
        const auto r = static_cast<Eigen::Index>(i);
        a(r, 0) = x;
        a(r, 1) = y;
        a(r, 2) = 1.0;
        b(r) = -(x * x + y * y);
    }
    const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
    CircleFit fit;
    fit.center = {mx - 0.5 * sol(0), my - 0.5 * sol(1)};
    fit.radius = std::sqrt(std::max(0.0, 0.25 * (sol(0) * sol(0) + sol(1) * sol(1)) - sol(2)));
    double acc = 0.0;
    for (const auto& p : points) {
        const double d = std::hypot(p[0] - fit.center[0], p[1] - fit.center[1]) - fit.radius;
        acc += d * d;
    }
    fit.rms = std::sqrt(acc / static_cast<double>(points.size()));
    return fit;
}

BulkDefect bulk_defect(const MatrixField& field, const Interface& iface, double epsilon) {
    const auto& g = field.grid();
    const double width = kCollarWidth * epsilon;
    std::vector<char> collar(g.cells(), 0);
    const long rx = static_cast<long>(std::ceil(width / g.spacing(0)));
    const long ry = g.m() == 2 ? static_cast<long>(std::ceil(width / g.spacing(1))) : 0;
    for (const auto& p : iface.points) {
        const long cx = static_cast<long>(std::floor(p[0] / g.spacing(0)));
        const long cy = g.m() == 2 ? static_cast<long>(std::floor(p[1] / g.spacing(1))) : 0;
        for (long dy = -ry - 1; dy <= ry + 1; ++dy) {
            for (long dx = -rx - 1; dx <= rx + 1; ++dx) {
                const std::size_t ix = wrap_index(cx + dx, g.size(0));
                const std::size_t iy = g.m() == 2 ? wrap_index(cy + dy, g.size(1)) : 0;
                const std::size_t k = g.index(ix, iy);
                if (collar[k]) continue;
                const auto x = g.position(k);
                const double ddx = wrap_delta(x[0] - p[0], g.length(0));
                const double ddy = g.m() == 2 ? wrap_delta(x[1] - p[1], g.length(1)) : 0.0;
                if (std::hypot(ddx, ddy) <= width) collar[k] = 1;
            }
        }
    }
    BulkDefect out;
    double a[64];
    for (std::size_t k = 0; k < g.cells(); ++k) {
        if (collar[k]) continue;
        gather(field, k, a);
        const double d = std::sqrt(gram_defect_sq(a, field.n()));
        if (small_det(a, field.n()) > 0.0)
            out.plus = std::max(out.plus, d);
        else
            out.minus = std::max(out.minus, d);
    }
    return out;
}

SquareMatrix polar_projection(const SquareMatrix& a, int sign) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.eigen(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd u = svd.matrixU();
    const Eigen::MatrixXd v = svd.matrixV();
    if ((u * v.transpose()).determinant() * sign < 0.0) u.col(u.cols() - 1) *= -1.0;
    return SquareMatrix(RowMajorMatrix(u * v.transpose()));
}

double householder_defect(const SquareMatrix& m) {
    const RowMajorMatrix sym = 0.5 * (m.eigen() + m.eigen().transpose());
    // the nearest reflection uses the eigenvector of the smallest eigenvalue of sym(M)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const Vector v = es.eigenvectors().col(0);
    return (m - UnitVector::normalized(v).reflector()).norm();
}

InterfaceResiduals interface_conditions(const MatrixField& field, const Interface& iface, double epsilon) {
    InterfaceResiduals out;
    out.angle = field.n() == 2 ? 0.0 : kNaN;
    if (iface.empty) {
        out.minimal_pair = out.neumann_jump = out.angle = kNaN;
        return out;
    }
    const auto& g = field.grid();
    const auto det = field.determinants();
    const std::size_t nx = g.size(0), ny = g.size(1);
    // central-difference gradient of det, interpolated bilinearly
    std::vector<double> gx(g.cells()), gy(g.cells(), 0.0);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t k = g.index(ix, iy);
            gx[k] = (det[g.index((ix + 1) % nx, iy)] - det[g.index((ix + nx - 1) % nx, iy)]) / (2.0 * g.spacing(0));
            if (g.m() == 2)
                gy[k] = (det[g.index(ix, (iy + 1) % ny)] - det[g.index(ix, (iy + ny - 1) % ny)]) / (2.0 * g.spacing(1));
        }
    }
    auto interp = [&](const std::vector<double>& f, std::array<double, 2> x) {
        const double ux = x[0] / g.spacing(0);
        const double fx = std::floor(ux), tx = ux - fx;
        const std::size_t i0 = wrap_index(static_cast<long>(fx), nx), i1 = (i0 + 1) % nx;
        if (g.m() == 1) return (1.0 - tx) * f[i0] + tx * f[i1];
        const double uy = x[1] / g.spacing(1);
        const double fy = std::floor(uy), ty = uy - fy;
        const std::size_t j0 = wrap_index(static_cast<long>(fy), ny), j1 = (j0 + 1) % ny;
        return (1.0 - ty) * ((1.0 - tx) * f[g.index(i0, j0)] + tx * f[g.index(i1, j0)]) +
               ty * ((1.0 - tx) * f[g.index(i0, j1)] + tx * f[g.index(i1, j1)]);
    };
    const double a = kProbeDistance * epsilon;
    const double delta = epsilon;
    const std::size_t n = field.n();
    double mp = 0.0, nj = 0.0, ang = 0.0;
    for (const auto& p : iface.points) {
        std::array<double, 2> nu{interp(gx, p), g.m() == 2 ? interp(gy, p) : 0.0};
        const double norm = std::hypot(nu[0], nu[1]);
        if (!(norm > 0.0)) {
            ++out.skipped;
            continue;
        }
        nu = {nu[0] / norm, nu[1] / norm};
        auto at = [&](double t) { return std::array<double, 2>{p[0] + t * nu[0], p[1] + t * nu[1]}; };
        const SquareMatrix rp1 = field.interpolate(at(a)), rp2 = field.interpolate(at(a + delta));
        const SquareMatrix rm1 = field.interpolate(at(-a)), rm2 = field.interpolate(at(-a - delta));
        if (!(determinant(rp1) > 0.0 && determinant(rp2) > 0.0 && determinant(rm1) < 0.0 && determinant(rm2) < 0.0)) {
            ++out.skipped;
            continue;
        }
        const SquareMatrix p1 = polar_projection(rp1, 1), p2 = polar_projection(rp2, 1);
        const SquareMatrix m1 = polar_projection(rm1, -1), m2 = polar_projection(rm2, -1);
        mp += householder_defect(p1.transpose() * m1);
        const SquareMatrix dplus = (1.0 / delta) * (p2 - p1);
        const SquareMatrix dminus = (1.0 / delta) * (m1 - m2);
        nj += (p1.transpose() * dplus - m1.transpose() * dminus).norm();
        if (n == 2) {
            // A+ = R(α+),  A− = R(α−) diag(−1, 1)
            const double ap1 = std::atan2(p1(1, 0), p1(0, 0)), ap2 = std::atan2(p2(1, 0), p2(0, 0));
            const double am1 = std::atan2(-m1(0, 1), m1(1, 1)), am2 = std::atan2(-m2(0, 1), m2(1, 1));
            ang += (std::abs(std::remainder(ap2 - ap1, 2.0 * std::numbers::pi)) +
                    std::abs(std::remainder(am1 - am2, 2.0 * std::numbers::pi))) /
                   delta;
        }
        ++out.samples;
    }
    if (out.samples == 0) {
        out.minimal_pair = out.neumann_jump = out.angle = kNaN;
        return out;
    }
    const double inv = 1.0 / static_cast<double>(out.samples);
    out.minimal_pair = mp * inv;
    out.neumann_jump = nj * inv;
    if (n == 2) out.angle = ang * inv;
    return out;
}

DiagRecord diagnose(const MatrixField& field, const RunConfig& cfg, std::size_t step_index) {
    DiagRecord r;
    r.step = step_index;
    r.time = field.time();
    r.energy = energy(field, cfg.epsilon);
    const Interface iface = extract_interface(field);
    r.interface_measure = iface.measure;
    r.interface_points = iface.points.size();
    r.radius_estimate = kNaN;
    r.fit_rms = kNaN;
    if (cfg.init == InitKind::circle && iface.points.size() >= 3) {
        const auto fit = fit_circle(iface.points);
        r.radius_estimate = fit.radius;
        r.fit_rms = fit.rms;
    }
    const auto bulk = bulk_defect(field, iface, cfg.epsilon);
    r.bulk_defect_plus = bulk.plus;
    r.bulk_defect_minus = bulk.minus;
    const auto res = interface_conditions(field, iface, cfg.epsilon);
    r.minimal_pair_residual = res.minimal_pair;
    r.neumann_jump_residual = res.neumann_jump;
    r.angle_residual = res.angle;
    r.skipped_probes = res.skipped;
    return r;
}

McfComparison mcf_compare(const std::vector<DiagRecord>& records, double epsilon) {
    std::vector<double> t, r2;
    for (const auto& r : records) {
        if (std::isfinite(r.radius_estimate) && r.radius_estimate > 4.0 * epsilon) {
            t.push_back(r.time);
            r2.push_back(r.radius_estimate * r.radius_estimate);
        }
    }
    if (t.size() < 3) throw DomainError("mcf_compare: fewer than 3 records with R > 4*eps");
    const double n = static_cast<double>(t.size());
    double mt = 0.0, mr = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mt += t[i];
        mr += r2[i];
    }
    mt /= n;
    mr /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        num += (t[i] - mt) * (r2[i] - mr);
        den += (t[i] - mt) * (t[i] - mt);
    }
    if (!(den > 0.0)) throw DomainError("mcf_compare: records span no time");
    McfComparison out;
    out.slope = num / den;
    out.deviation = std::abs(out.slope + 2.0) / 2.0;
    out.points = t.size();
    return out;
}

RunResult run(const RunConfig& cfg, std::optional<MatrixField> start) {
    cfg.validate();
    MatrixField field = start ? std::move(*start) : init_well_prepared(cfg);
    if (field.n() != cfg.n || !(field.grid() == cfg.make_grid()))
        throw ConfigError("run: starting field does not match the config");
    const double dt = cfg.time_step();
    const auto first = static_cast<std::size_t>(std::llround(field.time() / dt));
    const std::size_t total = std::max(first, cfg.total_steps());
    Stepper stepper(cfg, field.grid());
    RunResult out{{}, field, 0.0, 0};
    out.records.push_back(diagnose(field, cfg, first));
    double e_prev = out.records.back().energy;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = first; k < total; ++k) {
        stepper.step(field, k);
        const double e = energy(field, cfg.epsilon);
        worst = std::max(worst, (e - e_prev) / (1.0 + std::abs(e_prev)));
        e_prev = e;
        if ((k + 1) % cfg.diag_stride == 0 || k + 1 == total) out.records.push_back(diagnose(field, cfg, k + 1));
    }
    out.max_energy_increase = total > first ? worst : 0.0;
    out.steps = total - first;
    out.field = std::move(field);
    return out;
}

}  // namespace macf
