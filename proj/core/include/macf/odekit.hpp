#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "macf/frame.hpp"
#include "macf/orbit.hpp"

// Bounded solutions of the scalar operators L_i u = −u'' + κ_i(s(z)) u on the
// line, and of the matrix problem L_{P0} P = F with P0 = I − 2 s(z) nnᵀ.
//
// Grids must be uniform, contain z = 0, and be wide enough that the profile
// tails are below the working tolerance (|z| ≥ 15 is plenty).

namespace macf {

inline constexpr double kCompatTol = 1e-8;

struct ScalarRhs {
    std::vector<double> z;
    std::vector<double> f;
    double limit_minus = 0.0;
    double limit_plus = 0.0;
    int decay_class = 0;  // f − f± = O(|z|^k min(s, 1−s))

    /// Checks sizes, uniformity and that the end samples agree with the declared limits.
    /// Returns the measured tail constant C (see decay_class).
    double validate() const;
};

struct ScalarSolution {
    std::vector<double> u;
    double limit_minus;    // analytic z → −∞ limit
    double limit_plus;     // analytic z → +∞ limit
    double compat;         // weighted compatibility integral (0 for i = 5)
    double residual;       // ‖L_i u − f‖∞ on the interior, fourth-order differences
    double richardson;     // |fourth-order − trapezoid| estimate of the outer quadrature error
};

/// Raised when a compatibility or boundary condition fails; `condition` is the tag
/// ("B1".."B4", "O1".."O4") or "compat" for scalar solves.
class ConditionViolation : public DomainError {
public:
    ConditionViolation(std::string condition, double value, const std::string& message);
    const std::string& condition() const { return condition_; }
    double value() const { return value_; }

private:
    std::string condition_;
    double value_;
};

/// Weighted integral ∫ f w with w = s′, s, 1−s, 1 for i = 1..4 (analytic tails).
double check_compat(int i, const ScalarRhs& rhs);

/// Bounded solution of L_i u = f.
///   i = 1: datum = u(0)      i = 2: datum = u(+∞)
///   i = 3: datum = u(−∞)     i = 4: datum = u(+∞)       i = 5: unused
ScalarSolution solve_scalar(int i, const ScalarRhs& rhs, double datum);

/// ∫ τ f(τ) dτ: u(+∞) − u(−∞) for the i = 4 solution.
double l4_jump(const ScalarRhs& rhs);

/// s′E1, sE2, (1−s)E3, E4 for every E in the supplied bases of V1..V4.
std::vector<Profile> null_basis(const UnitVector& n, const std::array<std::vector<SquareMatrix>, 4>& bases,
                                const std::vector<double>& z);

/// Convenience overload using subspace_basis(i, n).
std::vector<Profile> null_basis(const UnitVector& n, const std::vector<double>& z);

/// L_{P0}P = −∂z²P + P0P0ᵀP + P0PᵀP0 + PP0ᵀP0 − P, second-order differences
/// (one-sided at the ends). Limits are the algebraic part applied to P±.
Profile apply_L(const Profile& p, const UnitVector& n);

struct MatrixRhs {
    Profile f;
    UnitVector direction;
};

struct ConditionReport {
    std::string condition;
    double value;
    double tolerance;
    bool pass() const { return value <= tolerance; }
};

/// (B1)–(B4) and (O1)–(O4) measured on rhs.
std::vector<ConditionReport> check_conditions(const MatrixRhs& rhs);

struct MatrixSolution {
    Profile p;
    SquareMatrix q_bar;
    double residual_norm;         // ‖L_{P0}P − F‖∞ on the interior via apply_L
    double scalar_residual_norm;  // max of the component solves' fourth-order residuals
};

/// Normalized solution: 𝒫2P(+∞) = 𝒫3P(−∞) = 𝒫4P(−∞) = 0, 𝒫1P(0) = 0,
/// Q̄ = 𝒫4P(+∞). Throws ConditionViolation naming the first failed condition.
MatrixSolution solve_matrix(const MatrixRhs& rhs);

}  // namespace macf
