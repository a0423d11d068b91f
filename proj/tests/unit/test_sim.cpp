#include <cmath>
#include <numbers>

#include "doctest.h"
#include "macf/matcore.hpp"
#include "macf/orbit.hpp"
#include "macf/sim.hpp"
#include "macf/verify.hpp"

using namespace macf;

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.epsilon = 0.04;
    cfg.grid = 128;
    cfg.radius = 0.3;
    cfg.diag_stride = 5;
    return cfg;
}

MatrixField constant_field(const RunConfig& cfg, const SquareMatrix& a) {
    MatrixField f(cfg.make_grid(), cfg.n);
    for (std::size_t k = 0; k < f.grid().cells(); ++k) f.set(k, a);
    return f;
}

double max_diff(const MatrixField& a, const MatrixField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

// classical RK4 with many substeps on A' = -eps^-2 f(A)
SquareMatrix ode_reference(SquareMatrix a, double eps, double t) {
    const int sub = 20000;
    const double h = t / sub;
    auto rhs = [eps](const SquareMatrix& x) { return (-1.0 / (eps * eps)) * f_cubic(x); };
    for (int k = 0; k < sub; ++k) {
        const SquareMatrix k1 = rhs(a), k2 = rhs(a + 0.5 * h * k1), k3 = rhs(a + 0.5 * h * k2), k4 = rhs(a + h * k3);
        a = a + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return a;
}

}  // namespace

TEST_CASE("periodic grid") {
    const PeriodicGrid g(2, {32, 16}, {2.0, 1.0});
    CHECK(g.cells() == 512);
    CHECK(g.spacing(0) == 0.0625);
    CHECK(g.index(3, 2) == 67);
    CHECK(g.position(67)[0] == 0.1875);
    CHECK(g.position(67)[1] == 0.125);
    CHECK(g.cell_volume() == 0.00390625);
    CHECK(g.fft_sizes() == std::vector<std::size_t>{16, 32});
    const PeriodicGrid line(1, {16, 1});
    CHECK(line.fft_sizes() == std::vector<std::size_t>{16});
}

TEST_CASE("matrix field interpolation") {
    RunConfig cfg = small_config();
    MatrixField f(cfg.make_grid(), 2);
    // linear in x within one cell
    for (std::size_t k = 0; k < f.grid().cells(); ++k) f.set(k, f.grid().position(k)[0] * SquareMatrix::identity(2));
    const double h = f.grid().spacing(0);
    CHECK(f.interpolate({10.5 * h, 3.2 * h})(0, 0) == doctest::Approx(10.5 * h));
    CHECK(f.interpolate({10.5 * h, 3.2 * h})(0, 1) == 0.0);
}

TEST_CASE("constant orthogonal field is a fixed point of both schemes") {
    Rng rng(1);
    for (auto scheme : {Scheme::semi_implicit, Scheme::explicit_euler}) {
        RunConfig cfg = small_config();
        cfg.n = 3;
        cfg.scheme = scheme;
        if (scheme == Scheme::explicit_euler) {
            const double h = 1.0 / cfg.grid;
            cfg.dt = h * h / 8.0;
        }
        const MatrixField f0 = constant_field(cfg, random_orthogonal(rng, 3, -1));
        MatrixField f = f0;
        for (int k = 0; k < 10; ++k) f = step(f, cfg);
        CHECK(max_diff(f, f0) < 1e-13);
        CHECK(energy(f, cfg.epsilon) < 1e-20);
    }
}

TEST_CASE("spatially constant data follow the reaction ODE") {
    Rng rng(2);
    RunConfig cfg = small_config();
    cfg.n = 3;
    cfg.grid = 64;
    cfg.epsilon = 0.2;
    const SquareMatrix a0 = random_orthogonal(rng, 3, 1) + 0.2 * random_matrix(rng, 3);
    std::vector<double> errs;
    for (double factor : {0.5, 0.25}) {
        cfg.dt = factor * 0.1 * cfg.epsilon * cfg.epsilon;
        MatrixField f = constant_field(cfg, a0);
        const int steps = static_cast<int>(std::lround(10 / factor));
        for (int k = 0; k < steps; ++k) f = step(f, cfg);
        const SquareMatrix ref = ode_reference(a0, cfg.epsilon, steps * cfg.dt);
        errs.push_back((f.at(17) - ref).norm());
        CHECK((f.at(0) - f.at(1000)).norm() < 1e-14);
    }
    CHECK(errs[0] < 0.05);
    INFO(errs[0] << " " << errs[1]);
    CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.1));  // first order in dt
}

TEST_CASE("one-dimensional minimal orbit is stationary") {
    RunConfig cfg;
    cfg.m = 1;
    cfg.n = 3;
    cfg.epsilon = 0.03;
    cfg.grid = 1024;
    cfg.init = InitKind::flat;
    const MatrixField f0 = init_well_prepared(cfg);
    // pointwise the initial data is the sampled orbit
    const auto pair = MinimalPair::from_plus(bulk_phase(cfg, {0.0, 0.0}), UnitVector::basis(3, 0));
    const double d = signed_distance(cfg, f0.grid().position(300));
    CHECK((f0.at(300) - theta0(pair, d / cfg.epsilon)).norm() < 1e-14);

    MatrixField f = f0;
    for (int k = 0; k < 100; ++k) f = step(f, cfg);
    CHECK(max_diff(f, f0) < 5e-3);
    const double e0 = energy(f0, cfg.epsilon);
    CHECK(e0 == doctest::Approx(2.0 * 2.0 * std::sqrt(2.0) / 3.0 / cfg.epsilon).epsilon(0.01));
}

TEST_CASE("translation equivariance") {
    RunConfig cfg = small_config();
    cfg.phase = 0.3;
    const MatrixField f0 = init_well_prepared(cfg);
    const auto& g = f0.grid();
    auto shift = [&](const MatrixField& f) {
        MatrixField out(g, f.n(), f.time());
        for (std::size_t iy = 0; iy < g.size(1); ++iy)
            for (std::size_t ix = 0; ix < g.size(0); ++ix)
                out.set(g.index((ix + 7) % g.size(0), (iy + 3) % g.size(1)), f.at(g.index(ix, iy)));
        return out;
    };
    MatrixField a = shift(f0), b = f0;
    for (int k = 0; k < 5; ++k) {
        a = step(a, cfg);
        b = step(b, cfg);
    }
    CHECK(max_diff(a, shift(b)) < 1e-12);
}

TEST_CASE("well-prepared circle") {
    RunConfig cfg;
    cfg.epsilon = 0.03;
    const MatrixField f = init_well_prepared(cfg);
    const auto& g = f.grid();
    CHECK(det_sign(f.at(g.index(128, 128))) == -1);
    CHECK(det_sign(f.at(g.index(5, 5))) == 1);
    const auto iface = extract_interface(f);
    REQUIRE_FALSE(iface.empty);
    const auto fit = fit_circle(iface.points);
    CHECK(std::abs(fit.radius - 0.35) < g.spacing(0));
    CHECK(fit.center[0] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(iface.measure == doctest::Approx(2 * std::numbers::pi * 0.35).epsilon(1e-3));
    const double e = energy(f, cfg.epsilon);
    CHECK(e == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0 * 2 * std::numbers::pi * 0.35 / cfg.epsilon).epsilon(0.05));
    const auto bd = bulk_defect(f, iface, cfg.epsilon);
    CHECK(bd.plus < 1e-3);
    CHECK(bd.minus < 1e-3);
}

TEST_CASE("uniform phase has no interface") {
    RunConfig cfg = small_config();
    const MatrixField f = constant_field(cfg, SquareMatrix::identity(2));
    CHECK(extract_interface(f).empty);
    const auto rec = diagnose(f, cfg, 0);
    CHECK(rec.interface_points == 0);
    CHECK(rec.energy == 0.0);
}

TEST_CASE("circle fit and projections") {
    std::vector<std::array<double, 2>> pts;
    for (int k = 0; k < 12; ++k) pts.push_back({0.3 + 0.2 * std::cos(k * 0.5), 0.1 + 0.2 * std::sin(k * 0.5)});
    const auto c = fit_circle(pts);
    CHECK(c.radius == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(c.center[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(c.rms < 1e-12);
    CHECK_THROWS(fit_circle({{0.0, 0.0}, {1.0, 0.0}}));

    Rng rng(3);
    const SquareMatrix q = random_orthogonal(rng, 3, -1);
    CHECK((polar_projection(q, -1) - q).norm() < 1e-12);
    CHECK(det_sign(polar_projection(random_matrix(rng, 3), 1)) == 1);
    CHECK(householder_defect(UnitVector::normalized(Vector::Ones(3)).reflector()) < 1e-14);
    CHECK(householder_defect(SquareMatrix::identity(3)) == doctest::Approx(2.0));
}

TEST_CASE("interface conditions on exact minimal-pair data") {
    RunConfig cfg;
    cfg.n = 3;
    cfg.init = InitKind::flat;
    const MatrixField f = init_well_prepared(cfg);
    const auto r = interface_conditions(f, extract_interface(f), cfg.epsilon);
    CHECK(r.samples > 0);
    CHECK(r.skipped == 0);
    CHECK(r.minimal_pair < 1e-8);
    CHECK(r.neumann_jump < 1e-8);
}

TEST_CASE("non-minimal data relax towards a minimal pair") {
    RunConfig cfg = small_config();
    cfg.n = 3;
    cfg.init = InitKind::flat;
    cfg.twist = 1.0;
    cfg.t_end = 0.02;
    cfg.diag_stride = 50;
    const auto res = run(cfg);
    const double first = res.records.front().minimal_pair_residual;
    const double last = res.records.back().minimal_pair_residual;
    CHECK(first > 0.5);
    CHECK(last < 0.5 * first);
    CHECK(res.max_energy_increase <= 1e-8);
}

TEST_CASE("run bookkeeping") {
    RunConfig cfg = small_config();
    const auto zero = run(cfg);
    CHECK(zero.records.size() == 1);
    CHECK(zero.steps == 0);
    CHECK(zero.records.front().energy == energy(init_well_prepared(cfg), cfg.epsilon));

    cfg.t_end = 40 * cfg.time_step();
    const auto a = run(cfg);
    const auto b = run(cfg);
    CHECK(a.steps == 40);
    CHECK(a.records.size() == 9);
    CHECK(a.field.values() == b.field.values());
    CHECK(a.max_energy_increase <= 1e-8);

    // checkpoint after 20 steps, then resume
    RunConfig half = cfg;
    half.t_end = 20 * cfg.time_step();
    const auto first = run(half);
    const auto resumed = run(cfg, first.field);
    CHECK(resumed.steps == 20);
    CHECK(resumed.field.values() == a.field.values());
    CHECK(resumed.records.back().energy == a.records.back().energy);
}

TEST_CASE("config validation") {
    RunConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    auto bad = [&](auto mutate) {
        RunConfig c = small_config();
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    bad([](RunConfig& c) { c.epsilon = 0.0; });
    bad([](RunConfig& c) { c.grid = 32; });
    bad([](RunConfig& c) { c.dt = 1.0; });
    bad([](RunConfig& c) { c.scheme = Scheme::explicit_euler; });
    bad([](RunConfig& c) { c.radius = 0.2; });
    bad([](RunConfig& c) { c.twist = 0.5; });
    bad([](RunConfig& c) { c.n = 1; });
    bad([](RunConfig& c) { c.init = InitKind::file; });
    bad([](RunConfig& c) { c.m = 1; });
}

TEST_CASE("mean curvature flow and flat stationarity") {
    // at eps = 0.025 the R^2 slope error is dominated by the O(dt/eps^2) splitting error
    std::vector<double> dev;
    for (double factor : {0.1, 0.05}) {
        RunConfig cfg;
        cfg.epsilon = 0.025;
        cfg.radius = 0.3;
        cfg.t_end = 0.025;
        cfg.dt = factor * cfg.epsilon * cfg.epsilon;
        cfg.diag_stride = factor > 0.075 ? 25 : 50;
        const auto res = run(cfg);
        const auto m = mcf_compare(res.records, cfg.epsilon);
        CHECK(m.points >= 3);
        CHECK(m.deviation < 0.05);
        dev.push_back(m.deviation);
        CHECK(res.max_energy_increase <= 1e-8);
    }
    CHECK(dev[1] < 0.6 * dev[0]);

    RunConfig flat;
    flat.init = InitKind::flat;
    flat.t_end = 0.01;
    flat.diag_stride = 20;
    const auto res = run(flat);
    for (const auto& r : res.records) CHECK(r.interface_measure == doctest::Approx(2.0).epsilon(0.01));
}
