#include <cmath>
#include <numbers>

#include "doctest.h"
#include "macf/matcore.hpp"
#include "macf/odekit.hpp"
#include "macf/spectra.hpp"
#include "macf/verify.hpp"

using namespace macf;

namespace {

Eigen::MatrixXd dense(const Tridiagonal& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = t.diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = t.offdiag[static_cast<std::size_t>(i)];
    }
    return m;
}

TrialFunction constant_trial(const IntervalOperator& op, double c = 1.0) {
    return {"const", std::vector<double>(op.r().size(), c)};
}

}  // namespace

TEST_CASE("operator construction") {
    const auto op = IntervalOperator::standard(1, 0.05);
    CHECK(op.spacing() <= 0.05 / 20 + 1e-15);
    CHECK(op.r().front() == -1.0);
    CHECK(op.r().back() == doctest::Approx(1.0));
    CHECK_THROWS_AS(IntervalOperator(1, 0.05, 21), DomainError);
    double total = 0.0;
    for (double m : op.mass()) total += m;
    CHECK(total == doctest::Approx(2.0));
}

TEST_CASE("free Laplacian spectrum") {
    // kappa_4 = 0: Neumann Laplacian on [-1, 1]
    const IntervalOperator op(4, 0.1, 801);
    const auto sp = eigen_smallest(op, 4);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(sp.values[0]) < 1e-9);
    CHECK(sp.values[1] == doctest::Approx(pi2 / 4).epsilon(1e-4));
    CHECK(sp.values[2] == doctest::Approx(pi2).epsilon(1e-4));
    CHECK(sp.values[3] == doctest::Approx(9 * pi2 / 4).epsilon(1e-4));
    // constant ground state
    const auto& v = sp.vectors[0];
    for (double x : v) CHECK(x == doctest::Approx(v[0]).epsilon(1e-8));
}

TEST_CASE("L5 is bounded below by 2/eps^2") {
    const double eps = 0.1;
    const auto sp = eigen_smallest(IntervalOperator::standard(5, eps), 1);
    CHECK(sp.values[0] >= 2.0 / (eps * eps) - 1e-8);
    CHECK(sp.values[0] == doctest::Approx(2.0 / (eps * eps)).epsilon(1e-8));
}

TEST_CASE("L1 ground state against a dense solver") {
    const double eps = 0.05;
    const auto op = IntervalOperator::standard(1, eps);
    const auto sp = eigen_smallest(op, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(op.system()));
    CHECK(sp.values[0] <= 1e-6);
    // the ground value sits at roundoff level, u ||T|| ~ 1e-10
    CHECK(std::abs(sp.values[0] - es.eigenvalues()(0)) < 1e-9);
    CHECK(sp.values[1] == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-10));
    // eigenvector proportional to theta_eps
    const auto& u = sp.vectors[0];
    const std::size_t mid = u.size() / 2;
    const double c = u[mid] / theta_eps(op.r()[mid], eps);
    for (std::size_t j = 0; j < u.size(); j += 10) CHECK(std::abs(u[j] - c * theta_eps(op.r()[j], eps)) < 1e-6);
    CHECK(ground_state_rayleigh(op) <= std::exp(-1.0 / eps));
}

TEST_CASE("second eigenvalue of L1 scales like 1/eps^2") {
    std::vector<double> scaled;
    for (double eps : {0.1, 0.05, 0.025}) scaled.push_back(eigen_smallest(IntervalOperator::standard(1, eps), 2).values[1] * eps * eps);
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    CHECK(*hi / *lo < 1.2);
}

TEST_CASE("L2 and L3 ground states approach zero from above") {
    double prev = 1e300;
    for (double eps : {0.1, 0.05, 0.025}) {
        const double l2 = eigen_smallest(IntervalOperator::standard(2, eps), 1).values[0];
        const double l3 = eigen_smallest(IntervalOperator::standard(3, eps), 1).values[0];
        CHECK(l2 >= -1e-9);
        CHECK(l3 >= -1e-9);
        CHECK(l2 <= prev);
        prev = l2;
    }
    // the plain discretization is biased below zero at O(h^2/eps^3)
    const double plain = eigen_smallest(IntervalOperator::standard(2, 0.05, Boundary::neumann, Discretization::plain), 1).values[0];
    CHECK(plain < 0.0);
    CHECK(plain > -1e-2);
}

TEST_CASE("coercivity on the ground-state trials") {
    const double eps = 0.05;
    const auto op2 = IntervalOperator::standard(2, eps);
    // q̄ ≡ 1: q2 = s_eps, q1 = theta_eps
    for (const auto& e : coercivity_check(CoercivityLemma::L23, eps, {constant_trial(op2)})) {
        INFO(e.lemma << " " << e.lhs << " " << e.rhs);
        CHECK(e.pass);
    }
    for (const auto& e : coercivity_check(CoercivityLemma::L1, eps, {constant_trial(op2)})) CHECK(e.pass);
    const auto trials = trial_family(op2, 7);
    CHECK(trials.size() == 13 + 3 + 4 + 20);
    for (auto lemma : {CoercivityLemma::L23, CoercivityLemma::L1, CoercivityLemma::L1out})
        for (const auto& e : coercivity_check(lemma, eps, trials)) {
            INFO(e.lemma << " " << e.trial << " " << e.constant);
            CHECK(e.pass);
        }
}

TEST_CASE("endpoint and sup-norm control") {
    const auto op4 = IntervalOperator::standard(4, 0.1);
    for (const auto& e : endpoint_check(op4, {constant_trial(op4, 2.0)})) CHECK(e.pass);
    for (int i = 1; i <= 5; ++i) {
        const auto op = IntervalOperator::standard(i, 0.05);
        for (const auto& e : endpoint_check(op, trial_family(op, 3))) {
            INFO(e.lemma << " " << e.trial << " " << e.constant);
            CHECK(e.pass);
        }
    }
}

TEST_CASE("product estimates") {
    for (double eps : {0.1, 0.05}) {
        const auto trials = trial_family(IntervalOperator::standard(1, eps), 5);
        for (auto lemma : {ProductLemma::P23, ProductLemma::P34, ProductLemma::P24, ProductLemma::P12, ProductLemma::P13})
            for (const auto& e : product_estimate_check(lemma, eps, trials)) {
                INFO(e.lemma << " " << e.trial << " " << e.constant);
                CHECK(e.pass);
            }
    }
}

TEST_CASE("cubic null cancellation") {
    Rng rng(1);
    const UnitVector n = random_unit(rng, 3);
    const auto z = uniform_grid(kDefaultZ, kDefaultZPoints);
    std::vector<SquareMatrix> q1, e2s, e3s, e4s;
    const SquareMatrix e2 = subspace_basis(2, n).front(), e3 = subspace_basis(3, n).front(), e4 = subspace_basis(4, n).front();
    for (double zj : z) {
        const auto d = s_derivs(zj);
        q1.push_back(d.d1 * n.outer());
        e2s.push_back(d.s * e2);
        e3s.push_back(d.one_minus_s * e3);
        e4s.push_back(e4);
    }
    const SquareMatrix zero(3);
    const Profile p1(z, q1, zero, zero), p2(z, e2s, zero, e2), p3(z, e3s, e3, zero), p4(z, e4s, e4, e4);
    CHECK(std::abs(cubic_null_cancellation(n, p1, p1, p1)) < 1e-12);
    CHECK(std::abs(cubic_null_cancellation(n, p2, p3, p4)) < 1e-10);
    // ∫ s(2s-1)(1-s) dz = 0 directly
    double sum = 0.0;
    for (double zj : z) {
        const auto d = s_derivs(zj);
        sum += d.s * (2 * d.s - 1) * d.one_minus_s;
    }
    CHECK(std::abs(sum * (z[1] - z[0])) < 1e-12);

    const SquareMatrix e5 = subspace_basis(5, n).front();
    const Profile c5(z, std::vector<SquareMatrix>(z.size(), e5), e5, e5);
    CHECK(std::isinf(cubic_null_cancellation(n, c5, c5, c5)));
    for (std::size_t dim : {2u, 3u})
        for (const auto& r : cancellation_checks(dim, 2)) CHECK(r.pass);
}

TEST_CASE("bilinear identity") {
    Rng rng(2);
    const UnitVector n = random_unit(rng, 3);
    const SquareMatrix z(3);
    auto in = [&](int i) { return project(i, random_matrix(rng, 3), n); };
    CHECK(bilinear_identity(n, in(2), in(3), in(4), z, z, z, z, 0.3) == 0.0);

    // only B1 + B2 and E2: T_f(P0, sE2, B):B = 2s(3-4s) E2:(B1B2 + B2B1)
    const SquareMatrix e2 = in(2), b1 = in(1), b2 = in(2);
    for (double s : {0.0, 0.3, 0.5, 1.0}) {
        const SquareMatrix b = b1 + b2;
        const double direct = frobenius(trilinear_Tf(n.reflector(s), s * e2, b), b);
        const double term = 2.0 * s * (3.0 - 4.0 * s) * frobenius(e2, b1 * b2 + b2 * b1);
        CHECK(direct == doctest::Approx(term).epsilon(1e-12).scale(1.0));
        CHECK(bilinear_identity(n, e2, z, z, b1, b2, z, z, s) < 1e-12);
    }
    for (double s : {0.0, 0.3, 0.5, 1.0})
        for (int k = 0; k < 25; ++k) CHECK(bilinear_identity(n, in(2), in(3), in(4), in(1), in(2), in(3), in(4), s) < 1e-10);
    CHECK_THROWS_AS(bilinear_identity(n, in(3), z, z, z, z, z, z, 0.5), DomainError);
}

TEST_CASE("spectral report") {
    const auto rep = spectral_report(1, 0.05, 0, 0);
    CHECK(rep.grid == 801);
    CHECK(rep.eigenvalues.size() == 6);
    CHECK(rep.all_pass());
    for (int op = 2; op <= 5; ++op) CHECK(spectral_report(op, 0.1, 0, 0).all_pass());
}
