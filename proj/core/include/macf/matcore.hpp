#pragma once

#include "macf/matrix.hpp"

// Exact algebra of the matrix-valued Allen-Cahn nonlinearity on n×n matrices.

namespace macf {

/// Default tolerance for algebraic identities; callers may pass their own.
inline constexpr double kIdentityTol = 1e-10;
/// |det| below this reports det_sign = 0.
inline constexpr double kDetZeroTol = 1e-12;

struct SymAsymSplit {
    SquareMatrix sym;
    SquareMatrix asym;
};

/// A : B = Σ AᵢⱼBᵢⱼ
double frobenius(const SquareMatrix& a, const SquareMatrix& b);

/// f(A) = A Aᵀ A − A
SquareMatrix f_cubic(const SquareMatrix& a);

/// F(A) = ¼‖AᵀA − I‖²
double potential_F(const SquareMatrix& a);

/// Linearization of f at B applied to A: BBᵀA + ABᵀB + BAᵀB − A.
SquareMatrix linearized_H(const SquareMatrix& b, const SquareMatrix& a);

/// T_f(A1,A2,A3) = (A1A2ᵀ + A2A1ᵀ)A3 + A3(A1ᵀA2 + A2ᵀA1) + (A1A3ᵀA2 + A2A3ᵀA1).
/// T_f(A1,A2,A3) : A4 is invariant under any permutation of the four arguments.
SquareMatrix trilinear_Tf(const SquareMatrix& a1, const SquareMatrix& a2, const SquareMatrix& a3);

SymAsymSplit sym_asym_split(const SquareMatrix& a);

/// ‖AᵀA − I‖ (Frobenius); zero exactly on O(n).
double orthogonality_defect(const SquareMatrix& a);

/// Sign of det(A) from partial-pivot LU; 0 when |det| < zero_tol.
int det_sign(const SquareMatrix& a, double zero_tol = kDetZeroTol);

double determinant(const SquareMatrix& a);

}  // namespace macf
