#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Fourth-order quadrature and differencing on uniform grids. Each panel
// [z_j, z_{j+1}] is integrated exactly for the cubic through the four nearest
// samples, so cumulative integrals stay fourth order right up to the ends.

namespace macf::quad {

/// C[j] = ∫_{z_0}^{z_j} f
std::vector<double> cumulative_from_left(std::span<const double> f, double h);
/// C[j] = ∫_{z_j}^{z_{N-1}} f
std::vector<double> cumulative_from_right(std::span<const double> f, double h);
/// C[j] = ∫_{z_anchor}^{z_j} f, accumulated outward from the anchor (no cancellation
/// against large far-field contributions).
std::vector<double> cumulative_from(std::span<const double> f, double h, std::size_t anchor);

/// ∫ over the whole grid.
double integrate(std::span<const double> f, double h);
/// Composite trapezoid, used as the coarse member of a Richardson pair.
double trapezoid(std::span<const double> f, double h);

/// Fourth-order first derivative (central interior, one-sided near the ends).
std::vector<double> derivative(std::span<const double> f, double h);
/// Fourth-order second derivative (central interior, one-sided near the ends).
std::vector<double> second_derivative(std::span<const double> f, double h);

/// Returns the uniform spacing of z, or throws DomainError when z is not uniform.
double uniform_spacing(std::span<const double> z, double rel_tol = 1e-9);

}  // namespace macf::quad
