#include <cmath>

#include "doctest.h"
#include "macf/matcore.hpp"
#include "macf/verify.hpp"

using namespace macf;

namespace {

SquareMatrix e(std::size_t n, std::size_t i, std::size_t j) {
    SquareMatrix m(n);
    m(i, j) = 1.0;
    return m;
}

// entrywise triple loops, no Eigen expressions
SquareMatrix naive_mul(const SquareMatrix& a, const SquareMatrix& b) {
    const std::size_t n = a.dim();
    SquareMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
}

}  // namespace

TEST_CASE("frobenius") {
    CHECK(frobenius(SquareMatrix::identity(3), SquareMatrix::identity(3)) == doctest::Approx(3.0));
    CHECK(frobenius(e(3, 0, 1), e(3, 1, 0)) == 0.0);
    Rng rng(1);
    const SquareMatrix a = random_matrix(rng, 4);
    double sum = 0.0;
    for (double v : a.row_major()) sum += v * v;
    CHECK(frobenius(a, a) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("f_cubic and potential on simple matrices") {
    CHECK(f_cubic(SquareMatrix::identity(3)).norm() == 0.0);
    const double c = 1.7;
    const SquareMatrix fc = f_cubic(c * SquareMatrix::identity(2));
    CHECK(fc(0, 0) == doctest::Approx(c * c * c - c));
    CHECK(fc(0, 1) == 0.0);
    CHECK(potential_F(SquareMatrix::identity(4)) == 0.0);
    CHECK(potential_F(SquareMatrix(3)) == doctest::Approx(0.75));
}

TEST_CASE("f against entrywise AA^TA - A") {
    Rng rng(2);
    for (int k = 0; k < 10; ++k) {
        const SquareMatrix a = random_matrix(rng, 3);
        const SquareMatrix ref = naive_mul(naive_mul(a, a.transpose()), a) - a;
        CHECK((f_cubic(a) - ref).norm() < 1e-12);
    }
}

TEST_CASE("f vanishes on O(n)") {
    Rng rng(3);
    for (std::size_t n : {2u, 3u, 4u})
        for (int k = 0; k < 200; ++k) CHECK(f_cubic(random_orthogonal(rng, n, k % 2 ? 1 : -1)).norm() < 1e-10);
}

TEST_CASE("linearized_H") {
    Rng rng(4);
    const SquareMatrix q = random_orthogonal(rng, 3, 1);
    CHECK((linearized_H(q, q) - 2.0 * q).norm() < 1e-12);

    const SquareMatrix b = random_matrix(rng, 3), a = random_matrix(rng, 3);
    const SquareMatrix h = linearized_H(b, a);
    double prev = 0.0;
    for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double err = ((1.0 / t) * (f_cubic(b + t * a) - f_cubic(b)) - h).norm();
        if (prev > 0.0) CHECK(std::log10(prev / err) == doctest::Approx(1.0).epsilon(0.05));
        prev = err;
    }
}

TEST_CASE("trilinear_Tf") {
    Rng rng(5);
    const SquareMatrix a = random_matrix(rng, 3);
    const SquareMatrix s = a + a.transpose();
    const SquareMatrix id = SquareMatrix::identity(3);
    // six terms I I S, I I S, S I I, S I I, I S^T I, I S^T I
    CHECK((trilinear_Tf(id, id, s) - 6.0 * s).norm() < 1e-12);
    CHECK(trilinear_Tf(a, SquareMatrix(3), s).norm() == 0.0);
    // T_f(A,A,A) = 6 A A^T A: the cubic term of f, polarized
    CHECK((trilinear_Tf(a, a, a) - 6.0 * naive_mul(naive_mul(a, a.transpose()), a)).norm() < 1e-11);
    const SquareMatrix b = random_matrix(rng, 3), c = random_matrix(rng, 3), d = random_matrix(rng, 3);
    CHECK(frobenius(trilinear_Tf(a, b, c), d) == doctest::Approx(frobenius(trilinear_Tf(a, b, d), c)).epsilon(1e-12));
    CHECK(frobenius(trilinear_Tf(a, b, c), d) == doctest::Approx(frobenius(trilinear_Tf(d, c, b), a)).epsilon(1e-12));
}

TEST_CASE("sym_asym_split") {
    const auto id = sym_asym_split(SquareMatrix::identity(3));
    CHECK((id.sym - SquareMatrix::identity(3)).norm() == 0.0);
    CHECK(id.asym.norm() == 0.0);
    const auto sp = sym_asym_split(e(3, 0, 1));
    CHECK(sp.sym(0, 1) == 0.5);
    CHECK(sp.sym(1, 0) == 0.5);
    CHECK(sp.asym(0, 1) == 0.5);
    CHECK(sp.asym(1, 0) == -0.5);
    Rng rng(6);
    const SquareMatrix a = random_matrix(rng, 4);
    const auto r = sym_asym_split(a);
    CHECK((r.sym + r.asym - a).norm() < 1e-15);
    CHECK((r.sym - r.sym.transpose()).norm() == 0.0);
}

TEST_CASE("orthogonality_defect and det_sign") {
    CHECK(orthogonality_defect(SquareMatrix::identity(3)) == 0.0);
    CHECK(orthogonality_defect(2.0 * SquareMatrix::identity(2)) == doctest::Approx(3.0 * std::sqrt(2.0)));
    const SquareMatrix house = UnitVector::normalized(Vector::Ones(3)).reflector();
    CHECK(orthogonality_defect(house) < 1e-14);
    CHECK(det_sign(SquareMatrix::identity(3)) == 1);
    CHECK(det_sign(house) == -1);
    SquareMatrix sing = SquareMatrix::identity(3);
    sing(2, 2) = 0.0;
    CHECK(det_sign(sing) == 0);
    CHECK(determinant(SquareMatrix(2, {1.0, 2.0, 3.0, 4.0})) == doctest::Approx(-2.0));
}

TEST_CASE("dimension mismatch throws") {
    CHECK_THROWS_AS(frobenius(SquareMatrix(2), SquareMatrix(3)), DimensionError);
}
