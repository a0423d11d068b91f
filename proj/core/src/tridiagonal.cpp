#include "macf/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace macf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_shape(const Tridiagonal& t) {
    if (t.diag.empty()) throw DimensionError("Tridiagonal: empty");
    if (t.offdiag.size() + 1 != t.diag.size()) throw DimensionError("Tridiagonal: offdiag must have length N-1");
}

double norm2(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace

std::vector<double> Tridiagonal::apply(const std::vector<double>& x) const {
    check_shape(*this);
    const std::size_t n = diag.size();
    if (x.size() != n) throw DimensionError("Tridiagonal::apply: size mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += offdiag[i - 1] * x[i - 1];
        if (i + 1 < n) v += offdiag[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

double Tridiagonal::norm_inf() const {
    check_shape(*this);
    double m = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double r = std::abs(diag[i]);
        if (i > 0) r += std::abs(offdiag[i - 1]);
        if (i < offdiag.size()) r += std::abs(offdiag[i]);
        m = std::max(m, r);
    }
    return m;
}

std::size_t sturm_count(const Tridiagonal& t, double x) {
    check_shape(t);
    const double pivmin = std::max(std::numeric_limits<double>::min(), kEps * t.norm_inf() * 1e-3);
    std::size_t count = 0;
    double d = t.diag[0] - x;
    for (std::size_t i = 0;; ++i) {
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++count;
        if (i + 1 == t.diag.size()) break;
        const double b = t.offdiag[i];
        d = (t.diag[i + 1] - x) - b * b / d;
    }
    return count;
}

std::vector<double> solve_shifted(const Tridiagonal& t, double shift, const std::vector<double>& b) {
    check_shape(t);
    const std::size_t n = t.diag.size();
    if (b.size() != n) throw DimensionError("solve_shifted: size mismatch");
    const double tiny = kEps * std::max(1.0, t.norm_inf());
    if (n == 1) {
        double d = t.diag[0] - shift;
        if (std::abs(d) < tiny) d = tiny;
        return {b[0] / d};
    }
    // Row i holds (l[i], d[i], u[i], u2[i]) after elimination with row swaps.
    std::vector<double> dl(t.offdiag), d(n), du(t.offdiag), du2(n, 0.0), rhs(b);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (std::abs(d[i]) < tiny) d[i] = tiny;
            const double m = dl[i] / d[i];
            d[i + 1] -= m * du[i];
            rhs[i + 1] -= m * rhs[i];
            dl[i] = m;
            if (i + 2 < n) du2[i] = 0.0;
        } else {
            const double m = d[i] / dl[i];
            d[i] = dl[i];
            const double tmp = d[i + 1];
            d[i + 1] = du[i] - m * tmp;
            du[i] = tmp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du2[i];
            }
            std::swap(rhs[i], rhs[i + 1]);
            rhs[i + 1] -= m * rhs[i];
            dl[i] = m;
        }
    }
    if (std::abs(d[n - 1]) < tiny) d[n - 1] = tiny;
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / d[n - 1];
    x[n - 2] = (rhs[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (std::size_t i = n - 2; i-- > 0;) x[i] = (rhs[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    return x;
}

EigenPairs eigen_smallest(const Tridiagonal& t, std::size_t k, double tol) {
    check_shape(t);
    const std::size_t n = t.size();
    if (k == 0 || k > n) throw DomainError("eigen_smallest: k must be in 1..N");
    const double tnorm = t.norm_inf();
    const double scale = std::max(1.0, tnorm);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(t.offdiag[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    lo -= kEps * scale;
    hi += kEps * scale;

    EigenPairs out;
    for (std::size_t j = 0; j < k; ++j) {
        double a = lo;
        double b = hi;
        for (int it = 0; it < 200 && b - a > 2.0 * kEps * std::max(std::abs(a), std::abs(b)) + 1e-300; ++it) {
            const double mid = 0.5 * (a + b);
            if (sturm_count(t, mid) > j) b = mid;
            else a = mid;
        }
        out.values.push_back(0.5 * (a + b));
    }

    for (std::size_t j = 0; j < k; ++j) {
        const double lambda = out.values[j];
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.25 * std::sin(1.7 * static_cast<double>(i + 3 * j) + 0.3);
        std::vector<double> history;
        double res = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 12; ++it) {
            v = solve_shifted(t, lambda, v);
            for (std::size_t p = 0; p < j; ++p) {
                const auto& w = out.vectors[p];
                const double c = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
                for (std::size_t i = 0; i < n; ++i) v[i] -= c * w[i];
            }
            const double nv = norm2(v);
            if (!(nv > 0.0) || !std::isfinite(nv)) break;
            for (auto& x : v) x /= nv;
            auto tv = t.apply(v);
            for (std::size_t i = 0; i < n; ++i) tv[i] -= lambda * v[i];
            res = norm2(tv);
            history.push_back(res);
            if (it >= 1 && res <= tol * scale) break;
        }
        if (!(res <= tol * scale)) {
            std::ostringstream os;
            os << "eigen_smallest: inverse iteration for eigenvalue " << j << " (" << lambda
               << ") did not converge; residuals:";
            for (double r : history) os << ' ' << r;
            throw EigenError(os.str());
        }
        // deterministic sign: largest-magnitude component positive
        const auto big = std::max_element(v.begin(), v.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
        if (*big < 0.0)
            for (auto& x : v) x = -x;
        out.vectors.push_back(std::move(v));
        out.residuals.push_back(res);
    }
    return out;
}

}  // namespace macf
