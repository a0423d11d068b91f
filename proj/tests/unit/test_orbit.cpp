#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "macf/matcore.hpp"
#include "macf/orbit.hpp"
#include "macf/verify.hpp"

using namespace macf;

namespace {

SquareMatrix rotation3(double a) {
    return SquareMatrix(3, {std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0, 1.0});
}

}  // namespace

TEST_CASE("transition profile") {
    CHECK(s_profile(0.0) == 0.5);
    CHECK(s_derivs(0.0).d1 == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-14));
    CHECK(s_profile(800.0) == 1.0);
    CHECK(s_profile(-800.0) == 0.0);
    CHECK(s_derivs(-40.0).one_minus_s == doctest::Approx(1.0));
    CHECK(s_derivs(40.0).one_minus_s > 0.0);
    // ∫ (s')² = √2/6 by Simpson on [-30, 30]
    const double h = 1e-3;
    double sum = 0.0;
    for (int j = -30000; j <= 30000; ++j) {
        const double w = (j == -30000 || j == 30000) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        sum += w * std::pow(s_derivs(j * h).d1, 2);
    }
    CHECK(sum * h / 3.0 == doctest::Approx(std::sqrt(2.0) / 6.0).epsilon(1e-12));
    // s' = √2 s(1-s), s'' from the profile ODE s'' = 2s(1-s)(1-2s)
    for (double z : {-3.0, -0.4, 0.0, 1.1, 5.0}) {
        const auto d = s_derivs(z);
        CHECK(d.d1 == doctest::Approx(std::sqrt(2.0) * d.s * d.one_minus_s).epsilon(1e-13));
        CHECK(d.d2 == doctest::Approx(2.0 * d.s * d.one_minus_s * (1.0 - 2.0 * d.s)).epsilon(1e-12));
    }
}

TEST_CASE("uniform grid") {
    const auto z = uniform_grid(2.0, 5);
    REQUIRE(z.size() == 5);
    CHECK(z[0] == -2.0);
    CHECK(z[2] == 0.0);
    CHECK(z[4] == 2.0);
}

TEST_CASE("is_minimal_pair") {
    const UnitVector e1 = UnitVector::basis(3, 0);
    const auto found = is_minimal_pair(e1.reflector(), SquareMatrix::identity(3));
    REQUIRE(found.has_value());
    CHECK((found->outer() - e1.outer()).norm() < 1e-14);

    // n = 2: every pair in O-(2) x O+(2) is minimal
    Rng rng(1);
    for (int k = 0; k < 20; ++k) {
        const SquareMatrix ap = random_orthogonal(rng, 2, 1), am = random_orthogonal(rng, 2, -1);
        const auto n = is_minimal_pair(am, ap);
        REQUIRE(n.has_value());
        CHECK((ap * n->reflector() - am).norm() < 1e-12);
    }

    const SquareMatrix am = SquareMatrix(3, {1, 0, 0, 0, 1, 0, 0, 0, -1}) * rotation3(std::numbers::pi / 2);
    CHECK_FALSE(is_minimal_pair(am, SquareMatrix::identity(3)).has_value());
    CHECK_THROWS_AS(is_minimal_pair(SquareMatrix::identity(3), SquareMatrix::identity(3)), DomainError);
}

TEST_CASE("minimal pair distance") {
    Rng rng(2);
    for (std::size_t n : {2u, 3u, 4u}) {
        const auto pair = MinimalPair::from_plus(random_orthogonal(rng, n, 1), random_unit(rng, n));
        CHECK((pair.a_minus() - pair.a_plus()).norm() == doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK_THROWS(MinimalPair(SquareMatrix::identity(3), SquareMatrix::identity(3), UnitVector::basis(3, 0)));
}

TEST_CASE("nearest minimal partner") {
    Rng rng(3);
    const SquareMatrix ap = random_orthogonal(rng, 3, 1);
    const UnitVector e1 = UnitVector::basis(3, 0);
    const auto exact = nearest_minimal_partner(ap, ap * e1.reflector());
    CHECK_FALSE(exact.degenerate);
    CHECK((exact.pair.direction().outer() - e1.outer()).norm() < 1e-12);
    CHECK(nearest_minimal_partner(ap, ap).degenerate);

    // brute force over a sphere mesh
    const SquareMatrix b = random_matrix(rng, 3);
    const auto best = nearest_minimal_partner(ap, b);
    const double got = (best.pair.a_minus() - b).norm();
    double brute = 1e300;
    const int m = 400;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j < 2 * m; ++j) {
            const double th = std::numbers::pi * i / m, ph = std::numbers::pi * j / m;
            Vector v(3);
            v << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
            brute = std::min(brute, (ap * UnitVector::normalized(v).reflector() - b).norm());
        }
    CHECK(got <= brute + 1e-12);
    CHECK(got == doctest::Approx(brute).epsilon(1e-3));
}

TEST_CASE("minimal orbit") {
    Rng rng(4);
    const auto pair = MinimalPair::from_plus(random_orthogonal(rng, 3, 1), random_unit(rng, 3));
    CHECK((theta0(pair, -60.0) - pair.a_minus()).norm() < 1e-15);
    CHECK((theta0(pair, 60.0) - pair.a_plus()).norm() < 1e-15);
    for (double z : {-2.0, 0.0, 0.7}) {
        const double s = s_profile(z);
        CHECK(potential_F(theta0(pair, z)) == doctest::Approx(4.0 * s * s * (1 - s) * (1 - s)).epsilon(1e-12));
    }
    const auto prof = theta0_profile(pair, uniform_grid(kDefaultZ, kDefaultZPoints));
    CHECK(line_energy(prof) == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-8));
    CHECK(prof.tail_constant() < 10.0);
    CHECK(theta0_residual_order(3, 4) > 1.9);
}

TEST_CASE("geodesic on O-(n)") {
    const SquareMatrix d = SquareMatrix(3, {1, 0, 0, 0, 1, 0, 0, 0, -1});
    const Geodesic still(d, d);
    CHECK((still.at(0.4) - d).norm() < 1e-14);
    CHECK(still.speed() < 1e-14);

    const double alpha = 1.3;
    const Geodesic g(d, d * rotation3(alpha));
    CHECK((g.at(0.5) - d * rotation3(alpha / 2)).norm() < 1e-12);
    CHECK((g.at(1.0) - d * rotation3(alpha)).norm() < 1e-12);
    CHECK(g.speed() == doctest::Approx(alpha * std::sqrt(2.0)).epsilon(1e-12));
    for (double t = 0.0; t <= 1.0; t += 0.125) {
        CHECK(g.velocity(t).norm() == doctest::Approx(g.speed()).epsilon(1e-10));
        CHECK(orthogonality_defect(g.at(t)) < 1e-12);
        CHECK(det_sign(g.at(t)) == -1);
    }
    // velocity against a central difference
    const double h = 1e-5;
    CHECK(((1.0 / (2 * h)) * (g.at(0.3 + h) - g.at(0.3 - h)) - g.velocity(0.3)).norm() < 1e-8);
    CHECK((geodesic_Ominus(d, d * rotation3(alpha), 0.5) - g.at(0.5)).norm() < 1e-14);
    CHECK_THROWS_AS(Geodesic(d, d * rotation3(std::numbers::pi)), DomainError);
}

TEST_CASE("quasi orbit") {
    Rng rng(5);
    const auto z = uniform_grid(12.0, 1201);
    const auto pair = MinimalPair::from_plus(random_orthogonal(rng, 3, 1), random_unit(rng, 3));
    const QuasiOrbit same = quasi_orbit(pair.a_minus(), pair.a_plus(), pair.direction(), z);
    for (std::size_t j = 0; j < z.size(); j += 100) {
        CHECK((same.phi[j] - pair.a_minus()).norm() < 1e-12);
        CHECK((same.theta[j] - theta0(pair, z[j])).norm() < 1e-12);
    }

    const auto rows = orbit_checks(3, 5);
    for (const auto& r : rows) {
        INFO(r.id << " " << r.measured);
        CHECK(r.pass);
    }
}

TEST_CASE("profile csv") {
    const auto pair = MinimalPair::from_plus(SquareMatrix::identity(2), UnitVector::basis(2, 1));
    std::ostringstream os;
    write_profile_csv(os, theta0_profile(pair, uniform_grid(1.0, 3)));
    std::string header;
    std::getline(std::istringstream(os.str()) >> std::ws, header);
    CHECK(header == "z,a00,a01,a10,a11");
}
