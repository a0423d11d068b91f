#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "macf/frame.hpp"
#include "macf/matrix.hpp"

// Transition profile, minimal pairs, minimal connecting orbits and the
// geodesic-based quasi-minimal orbits Θ = Φ(z)(I − 2s(z)nnᵀ).

namespace macf {

inline constexpr double kSqrt2 = 1.41421356237309504880;

/// s(z) = 1 − (1 + e^{√2 z})⁻¹, evaluated without overflow.
double s_profile(double z);

struct SDerivs {
    double s;
    double one_minus_s;  // 1 − s computed as s(−z), accurate in the left tail
    double d1;
    double d2;
    double d3;
};

SDerivs s_derivs(double z);

/// Uniform grid on [−half_width, half_width]; odd point counts include z = 0.
std::vector<double> uniform_grid(double half_width, std::size_t points);

inline constexpr double kDefaultZ = 20.0;
inline constexpr std::size_t kDefaultZPoints = 2001;

/// Sampled matrix-valued function of the stretched variable z with limits at ±∞.
class Profile {
public:
    Profile(std::vector<double> z, std::vector<SquareMatrix> samples, SquareMatrix limit_minus,
            SquareMatrix limit_plus, double decay_rate = kSqrt2);

    const std::vector<double>& z() const { return z_; }
    const std::vector<SquareMatrix>& samples() const { return samples_; }
    const SquareMatrix& operator[](std::size_t j) const { return samples_[j]; }
    std::size_t size() const { return z_.size(); }
    std::size_t dim() const { return samples_.front().dim(); }
    const SquareMatrix& limit_minus() const { return limit_minus_; }
    const SquareMatrix& limit_plus() const { return limit_plus_; }
    double decay_rate() const { return decay_rate_; }
    /// C in ‖sample(±Z) − limit_±‖ ≤ C e^{−decay_rate Z}, measured at construction.
    double tail_constant() const { return tail_constant_; }
    /// Grid spacing; throws DomainError when the grid is not uniform.
    double spacing() const;

    /// Column (r, c) of the samples as a scalar series.
    std::vector<double> entry(std::size_t r, std::size_t c) const;

private:
    std::vector<double> z_;
    std::vector<SquareMatrix> samples_;
    SquareMatrix limit_minus_;
    SquareMatrix limit_plus_;
    double decay_rate_;
    double tail_constant_ = 0.0;
};

/// CSV: header "z,a00,a01,...", then one row per sample.
void write_profile_csv(std::ostream& os, const Profile& p);
void write_profile_csv(const std::string& path, const Profile& p);

/// (A−, A+) ∈ O⁻(n) × O⁺(n) with A− = A+(I − 2nnᵀ).
class MinimalPair {
public:
    static MinimalPair from_plus(const SquareMatrix& a_plus, const UnitVector& n);
    /// Validates the Householder relation and ‖A− − A+‖ = 2 within tol.
    MinimalPair(SquareMatrix a_minus, SquareMatrix a_plus, UnitVector n, double tol = 1e-10);

    const SquareMatrix& a_minus() const { return a_minus_; }
    const SquareMatrix& a_plus() const { return a_plus_; }
    const UnitVector& direction() const { return n_; }

private:
    SquareMatrix a_minus_;
    SquareMatrix a_plus_;
    UnitVector n_;
};

/// Flips v so that its first component with |v_i| > 1e−12 is positive.
Vector canonical_sign(Vector v);

/// Direction n with A− = A+(I − 2nnᵀ), or empty when the pair is not minimal.
/// Throws DomainError when the inputs are not in O⁻(n) × O⁺(n) within tol.
std::optional<UnitVector> is_minimal_pair(const SquareMatrix& a_minus, const SquareMatrix& a_plus,
                                          double tol = 1e-10);

struct NearestPartner {
    MinimalPair pair;
    bool degenerate;
};

/// Minimal pair (A+(I − 2nnᵀ), A+) whose A− is Frobenius-closest to the hint b.
NearestPartner nearest_minimal_partner(const SquareMatrix& a_plus, const SquareMatrix& b);

/// Θ0(z) = s(z)A+ + (1 − s(z))A−
SquareMatrix theta0(const MinimalPair& pair, double z);
Profile theta0_profile(const MinimalPair& pair, const std::vector<double>& z);

/// ∫ (½‖∂zΘ‖² + F(Θ)) dz with fourth-order differencing and quadrature on the samples.
double line_energy(const Profile& theta);

/// Constant-speed geodesic on O⁻(n): Φ̄(τ) = Φ− exp(τX), X the principal log of Φ−ᵀΦ+.
class Geodesic {
public:
    /// Throws DomainError if an endpoint is not in O⁻(n) or Φ−ᵀΦ+ has an eigenvalue
    /// within 1e−6 of −1 ("cut locus").
    Geodesic(const SquareMatrix& phi_minus, const SquareMatrix& phi_plus);

    SquareMatrix at(double tau) const;
    /// dΦ̄/dτ = Φ̄(τ) X
    SquareMatrix velocity(double tau) const;
    /// d²Φ̄/dτ² = Φ̄(τ) X²
    SquareMatrix acceleration(double tau) const;
    const SquareMatrix& log() const { return x_; }
    /// ‖dΦ̄/dτ‖ = ‖X‖
    double speed() const { return x_.norm(); }

private:
    SquareMatrix phi_minus_;
    RowMajorMatrix schur_basis_;
    std::vector<std::size_t> block_start_;
    std::vector<double> block_angle_;
    SquareMatrix x_;

    RowMajorMatrix exp_tx(double tau) const;
};

SquareMatrix geodesic_Ominus(const SquareMatrix& phi_minus, const SquareMatrix& phi_plus, double tau);

struct QuasiOrbit {
    Geodesic geodesic;
    UnitVector direction;
    SquareMatrix phi_minus;
    SquareMatrix phi_plus;
    Profile phi;
    Profile theta;
    /// max_z ‖Φ(z) − Φ±‖ e^{√2|z|} and max_z ‖∂zΦ‖ e^{√2|z|}.
    double phi_decay_constant;
    double dphi_decay_constant;

    /// Φ(z), ∂zΦ, ∂z²Φ from the chain rule through τ = s(z).
    SquareMatrix phi_at(double z) const;
    SquareMatrix dphi_at(double z) const;
    SquareMatrix d2phi_at(double z) const;
    /// Θ(z), ∂zΘ, ∂z²Θ in closed form.
    SquareMatrix theta_at(double z) const;
    SquareMatrix dtheta_at(double z) const;
    SquareMatrix d2theta_at(double z) const;
};

QuasiOrbit quasi_orbit(const SquareMatrix& a_minus, const SquareMatrix& a_plus, const UnitVector& n,
                       const std::vector<double>& z);

}  // namespace macf
