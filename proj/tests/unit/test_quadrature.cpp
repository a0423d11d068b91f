#include <cmath>

#include "doctest.h"
#include "macf/error.hpp"
#include "macf/quadrature.hpp"

using namespace macf;

namespace {

std::vector<double> sample(double (*f)(double), double a, double h, std::size_t n) {
    std::vector<double> v;
    for (std::size_t j = 0; j < n; ++j) v.push_back(f(a + h * j));
    return v;
}

}  // namespace

TEST_CASE("cubics are integrated exactly") {
    const double h = 0.1;
    const auto f = sample([](double x) { return 1.0 - 2.0 * x + 3.0 * x * x - x * x * x; }, 0.0, h, 21);
    // ∫_0^2 = 2 - 4 + 8 - 4
    CHECK(quad::integrate(f, h) == doctest::Approx(2.0).epsilon(1e-13));
    const auto left = quad::cumulative_from_left(f, h);
    const auto right = quad::cumulative_from_right(f, h);
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = h * j;
        const double exact = x - x * x + x * x * x - x * x * x * x / 4;
        CHECK(left[j] == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
        CHECK(left[j] + right[j] == doctest::Approx(2.0).epsilon(1e-12));
    }
    const auto mid = quad::cumulative_from(f, h, 10);
    CHECK(mid[10] == 0.0);
    CHECK(mid[20] == doctest::Approx(left[20] - left[10]).epsilon(1e-12));
}

TEST_CASE("fourth-order convergence") {
    auto err = [](std::size_t n) {
        const double h = 2.0 / (n - 1);
        const auto f = sample([](double x) { return std::exp(std::sin(3 * x)); }, 0.0, h, n);
        const auto d = quad::derivative(f, h);
        const auto d2 = quad::second_derivative(f, h);
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = h * j;
            const double fx = std::exp(std::sin(3 * x));
            e1 = std::max(e1, std::abs(d[j] - 3 * std::cos(3 * x) * fx));
            e2 = std::max(e2, std::abs(d2[j] - (9 * std::cos(3 * x) * std::cos(3 * x) - 9 * std::sin(3 * x)) * fx));
        }
        return std::pair{e1, e2};
    };
    const auto [a1, a2] = err(201);
    const auto [b1, b2] = err(401);
    CHECK(std::log2(a1 / b1) > 3.7);
    CHECK(std::log2(a2 / b2) > 2.7);  // one-sided end stencils lose an order
}

TEST_CASE("trapezoid and spacing") {
    const std::vector<double> f{1.0, 1.0, 1.0};
    CHECK(quad::trapezoid(f, 0.5) == 1.0);
    const std::vector<double> z{0.0, 0.1, 0.2, 0.3};
    CHECK(quad::uniform_spacing(z) == doctest::Approx(0.1));
    const std::vector<double> bad{0.0, 0.1, 0.25};
    CHECK_THROWS_AS(quad::uniform_spacing(bad), DomainError);
}
