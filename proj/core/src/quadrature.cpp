#include "macf/quadrature.hpp"

#include <cmath>

#include "macf/error.hpp"

namespace macf::quad {

namespace {

void require_points(std::span<const double> f, std::size_t min_points) {
    if (f.size() < min_points) throw DomainError("quadrature: need at least " + std::to_string(min_points) + " samples");
}

// ∫_{z_j}^{z_{j+1}} f for the cubic through four neighbouring samples.
double panel(std::span<const double> f, double h, std::size_t j) {
    const std::size_t n = f.size();
    if (j == 0) return h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
    if (j + 2 == n) return h * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]) / 24.0;
    return h * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2]) / 24.0;
}

}  // namespace

std::vector<double> cumulative_from_left(std::span<const double> f, double h) {
    return cumulative_from(f, h, 0);
}

std::vector<double> cumulative_from_right(std::span<const double> f, double h) {
    require_points(f, 4);
    const std::size_t n = f.size();
    std::vector<double> c(n, 0.0);
    for (std::size_t j = n - 1; j-- > 0;) c[j] = c[j + 1] + panel(f, h, j);
    return c;
}

std::vector<double> cumulative_from(std::span<const double> f, double h, std::size_t anchor) {
    require_points(f, 4);
    const std::size_t n = f.size();
    if (anchor >= n) throw DomainError("cumulative_from: anchor out of range");
    std::vector<double> c(n, 0.0);
    for (std::size_t j = anchor + 1; j < n; ++j) c[j] = c[j - 1] + panel(f, h, j - 1);
    for (std::size_t j = anchor; j-- > 0;) c[j] = c[j + 1] - panel(f, h, j);
    return c;
}

double integrate(std::span<const double> f, double h) {
    require_points(f, 4);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < f.size(); ++j) acc += panel(f, h, j);
    return acc;
}

double trapezoid(std::span<const double> f, double h) {
    require_points(f, 2);
    double acc = 0.5 * (f.front() + f.back());
    for (std::size_t j = 1; j + 1 < f.size(); ++j) acc += f[j];
    return acc * h;
}

std::vector<double> derivative(std::span<const double> f, double h) {
    require_points(f, 5);
    const std::size_t n = f.size();
    std::vector<double> d(n);
    for (std::size_t j = 2; j + 2 < n; ++j) d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * h);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * h);
    return d;
}

std::vector<double> second_derivative(std::span<const double> f, double h) {
    require_points(f, 6);
    const std::size_t n = f.size();
    const double h2 = h * h;
    std::vector<double> d(n);
    for (std::size_t j = 2; j + 2 < n; ++j)
        d[j] = (-f[j - 2] + 16.0 * f[j - 1] - 30.0 * f[j] + 16.0 * f[j + 1] - f[j + 2]) / (12.0 * h2);
    d[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) / (12.0 * h2);
    d[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) / (12.0 * h2);
    d[n - 1] = (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5] -
                10.0 * f[n - 6]) / (12.0 * h2);
    d[n - 2] = (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] + f[n - 6]) /
               (12.0 * h2);
    return d;
}

double uniform_spacing(std::span<const double> z, double rel_tol) {
    if (z.size() < 2) throw DomainError("uniform_spacing: need at least two points");
    const double h = (z.back() - z.front()) / static_cast<double>(z.size() - 1);
    if (!(h > 0.0)) throw DomainError("uniform_spacing: grid must be strictly increasing");
    for (std::size_t j = 1; j < z.size(); ++j) {
        if (std::abs((z[j] - z[j - 1]) - h) > rel_tol * h) throw DomainError("uniform_spacing: grid is not uniform");
    }
    return h;
}

}  // namespace macf::quad
