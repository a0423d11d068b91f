#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "macf/frame.hpp"
#include "macf/orbit.hpp"
#include "macf/tridiagonal.hpp"

// The scalar operators L_i = −∂r² + ε⁻²κ_i(s_ε(r)) on [−1, 1], their
// discretization and eigenpairs, and numerical checks of the coercivity,
// endpoint and product inequalities that control them. Also the two exact
// trilinear identities: the cubic-null cancellation and the bilinear formula.

namespace macf {

enum class Boundary { neumann, dirichlet };
enum class Discretization {
    factored,  // i = 1,2,3: interior potential (φ_{j−1} − 2φ_j + φ_{j+1})/(h²φ_j), φ the ground state
    plain      // κ_i(s_ε(r_j))/ε² at every node
};

/// s_ε(r) = s(r/ε), θ_ε(r) = s′(r/ε) = ε ∂r s_ε
double s_eps(double r, double eps);
double theta_eps(double r, double eps);

class IntervalOperator {
public:
    /// Uniform grid on [−1, 1] with spacing ≤ ε/10 (grid = number of points).
    IntervalOperator(int i, double eps, std::size_t grid, Boundary bc = Boundary::neumann,
                     Discretization disc = Discretization::factored);
    /// Grid with spacing ε/20 (rounded to cover [−1, 1] exactly).
    static IntervalOperator standard(int i, double eps, Boundary bc = Boundary::neumann,
                                     Discretization disc = Discretization::factored);

    int index() const { return i_; }
    double epsilon() const { return eps_; }
    double spacing() const { return h_; }
    Boundary boundary() const { return bc_; }
    Discretization discretization() const { return disc_; }
    const std::vector<double>& r() const { return r_; }
    /// Nodal potential (already scaled by ε⁻²).
    const std::vector<double>& potential() const { return pot_; }
    /// Trapezoid weights (Neumann) or interior weights h (Dirichlet, ends 0).
    const std::vector<double>& mass() const { return mass_; }

    /// Σ (q_{j+1} − q_j)²/h + Σ M_j V_j q_j²: the discrete ∫ (q′)² + ε⁻²κ_i q².
    /// Dirichlet operators ignore the end samples.
    double quadratic_form(const std::vector<double>& q) const;
    /// Σ M_j q_j²
    double l2(const std::vector<double>& q) const;
    /// Σ M_j a_j b_j
    double inner(const std::vector<double>& a, const std::vector<double>& b) const;
    /// Σ h w_{j+½} ((g_{j+1} − g_j)/h)² with w_{j+½} = φ_j φ_{j+1}: the discrete ∫ φ²(g′)².
    double weighted_dirichlet(const std::vector<double>& phi, const std::vector<double>& g) const;

    /// Symmetric tridiagonal M^{-1/2}(K + MV)M^{-1/2} acting on the active nodes.
    Tridiagonal system() const;
    /// Active node range [first, last].
    std::size_t first_active() const { return bc_ == Boundary::dirichlet ? 1 : 0; }
    std::size_t last_active() const { return bc_ == Boundary::dirichlet ? r_.size() - 2 : r_.size() - 1; }

private:
    int i_;
    double eps_;
    double h_;
    Boundary bc_;
    Discretization disc_;
    std::vector<double> r_;
    std::vector<double> pot_;
    std::vector<double> mass_;
};

inline IntervalOperator discretize(int i, double eps, std::size_t grid, Boundary bc = Boundary::neumann,
                                   Discretization disc = Discretization::factored) {
    return IntervalOperator(i, eps, grid, bc, disc);
}

struct OperatorSpectrum {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // nodal values, unit in the mass inner product
    std::vector<double> residuals;             // ‖Sv − λv‖₂ of the symmetric system
};

OperatorSpectrum eigen_smallest(const IntervalOperator& op, std::size_t k);

/// Rayleigh quotient of the exact ground state φ (θ_ε, s_ε, 1 − s_ε for i = 1, 2, 3)
/// evaluated by summation by parts, so exponentially small values are not lost to
/// cancellation. Requires the factored Neumann discretization. By min–max it bounds
/// the smallest eigenvalue from above.
double ground_state_rayleigh(const IntervalOperator& op);

struct CheckEntry {
    std::string lemma;      // e.g. "coercivity/L23"
    std::string trial;      // trial description
    double lhs;
    double rhs;
    double margin;          // (lhs − rhs) or (rhs − lhs), normalized; ≥ 0 means the inequality holds
    double constant;        // measured constant (C0, C, ...)
    bool pass;
};

struct TrialFunction {
    std::string name;
    std::vector<double> values;
};

/// Chebyshev T_0..T_12, s_ε, 1 − s_ε, θ_ε, θ_ε translated to r0 ∈ {−1, −0.5, 0.5, 1},
/// and `random_count` random Chebyshev combinations drawn from `seed`.
std::vector<TrialFunction> trial_family(const IntervalOperator& op, std::uint64_t seed = 0,
                                        std::size_t random_count = 20);

inline constexpr double kNu0 = 0.25;
/// Upper limit on measured constants C0 / C(ν0) / C for a check to pass.
inline constexpr double kConstantCap = 100.0;
/// Lower limit on the measured second-eigenvalue constant C in the orthogonal-complement bound.
inline constexpr double kOrthogonalBoundMin = 1.0;
/// Numerical floor added to exponentially small remainder scales (roundoff of the
/// discrete quadratic form).
inline constexpr double kRemainderFloor = 1e-10;

enum class CoercivityLemma { L23, L1, L1out };

std::vector<CheckEntry> coercivity_check(CoercivityLemma lemma, double eps,
                                         const std::vector<TrialFunction>& trials,
                                         Discretization disc = Discretization::factored);

/// L∞ control for i = 2..5 and endpoint control for i = 1.
std::vector<CheckEntry> endpoint_check(const IntervalOperator& op, const std::vector<TrialFunction>& trials);

enum class ProductLemma { P23, P34, P24, P12, P13 };

std::string to_string(CoercivityLemma l);
std::string to_string(ProductLemma l);

/// Product estimates over all trial pairs and a ∈ {1, r, cos πr}.
std::vector<CheckEntry> product_estimate_check(ProductLemma lemma, double eps,
                                               const std::vector<TrialFunction>& trials);

/// ∫ T_f(P0, Q1, Q2) : Q3 dz for null-space profiles on a common grid.
/// Returns +∞ when the integrand does not vanish at ±∞.
double cubic_null_cancellation(const UnitVector& n, const Profile& q1, const Profile& q2, const Profile& q3);

/// T_f(P0, P1, B) : B minus the closed-form right side, with P1 = sE2 + (1−s)E3 + E4,
/// B = B1 + B2 + B3 + B4 and P0 = I − 2s nnᵀ.
double bilinear_identity(const UnitVector& n, const SquareMatrix& e2, const SquareMatrix& e3,
                         const SquareMatrix& e4, const SquareMatrix& b1, const SquareMatrix& b2,
                         const SquareMatrix& b3, const SquareMatrix& b4, double s);

struct SpectralReport {
    int op;
    double epsilon;
    std::size_t grid;
    std::vector<double> eigenvalues;
    std::vector<CheckEntry> checks;

    bool all_pass() const;
};

/// Eigenvalues of L_op plus every inequality check relevant to op.
SpectralReport spectral_report(int op, double eps, std::size_t grid, std::uint64_t seed = 0,
                               std::size_t eigen_count = 6);

}  // namespace macf
