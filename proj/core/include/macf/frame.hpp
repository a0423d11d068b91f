#pragma once

#include <array>
#include <cstddef>

#include "macf/matrix.hpp"

// Direction-anchored orthogonal splitting M_n = V1 ⊕ ... ⊕ V5 and the scalar
// potentials of the diagonalized linearized operator.
//
//   V1 = span{n nᵀ}
//   V2 = {n lᵀ + l nᵀ : l ⊥ n}          V3 = {n lᵀ − l nᵀ : l ⊥ n}
//   V4 = span{l mᵀ − m lᵀ : l, m ⊥ n}   V5 = span{l lᵀ, l mᵀ + m lᵀ : l, m ⊥ n}
//
// Everything here depends on n only through n nᵀ.

namespace macf {

/// Unit vector in R^n (|norm − 1| ≤ 1e−12 enforced at construction).
class UnitVector {
public:
    explicit UnitVector(Vector v);
    /// Normalizes v; throws DomainError for a (near) zero vector.
    static UnitVector normalized(const Vector& v);
    static UnitVector basis(std::size_t n, std::size_t i);

    std::size_t dim() const { return static_cast<std::size_t>(v_.size()); }
    const Vector& vec() const { return v_; }
    double operator[](std::size_t i) const { return v_(static_cast<Eigen::Index>(i)); }

    /// n nᵀ
    SquareMatrix outer() const { return SquareMatrix::outer(v_, v_); }
    /// I − 2 s n nᵀ  (s = 1 gives the Householder reflection)
    SquareMatrix reflector(double s = 1.0) const;

private:
    Vector v_;
};

inline constexpr double kUnitTol = 1e-12;

struct FrameDecomposition {
    std::array<SquareMatrix, 5> parts;  // parts[i-1] ∈ V_i
    UnitVector direction;

    SquareMatrix sum() const;
};

/// 𝒫_i A for i ∈ 1..5.
SquareMatrix project(int i, const SquareMatrix& a, const UnitVector& n);

FrameDecomposition decompose(const SquareMatrix& a, const UnitVector& n);

/// κ1 = 2(1−6s+6s²), κ2 = 2(1−s)(1−2s), κ3 = 2s(2s−1), κ4 = 0, κ5 = 2.
double kappa(int i, double s);

/// dim V_i for matrix size n: (1, n−1, n−1, (n−1)(n−2)/2, n(n−1)/2).
std::size_t subspace_dim(int i, std::size_t n);

struct ConjugationResiduals {
    double p2_to_p3;  // ‖R𝒫2A − 𝒫3(RA)‖
    double p3_to_p2;  // ‖R𝒫3A − 𝒫2(RA)‖
    double p4_fixed;  // ‖𝒫4(RA) − R𝒫4A‖ + ‖R𝒫4A − 𝒫4A‖
    double max() const;
};

/// Residuals of the reflection identities with R = I − 2nnᵀ.
ConjugationResiduals reflect_conjugation_check(const SquareMatrix& a, const UnitVector& n);

/// H_{P0}B : B with P0 = I − 2 s n nᵀ, cross-checked against Σ κ_i(s)‖𝒫_i B‖².
/// Throws IdentityViolation when the two evaluations differ by more than tol.
double bulk_quadratic_form(double s, const SquareMatrix& b, const UnitVector& n, double tol = 1e-10);

/// Orthonormal (Frobenius) basis of V_i built from an orthonormal complement of n.
/// Ordered deterministically; used for null-space bases and dimension audits.
std::vector<SquareMatrix> subspace_basis(int i, const UnitVector& n);

}  // namespace macf
