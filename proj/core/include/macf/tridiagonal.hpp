#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "macf/error.hpp"

// Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
// eigenvalues, inverse iteration for the eigenvectors.

namespace macf {

struct Tridiagonal {
    std::vector<double> diag;     // length N
    std::vector<double> offdiag;  // length N − 1

    std::size_t size() const { return diag.size(); }
    /// y = T x
    std::vector<double> apply(const std::vector<double>& x) const;
    /// ‖T‖∞
    double norm_inf() const;
};

/// Number of eigenvalues strictly below x.
std::size_t sturm_count(const Tridiagonal& t, double x);

struct EigenPairs {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // unit 2-norm
    std::vector<double> residuals;             // ‖Tv − λv‖₂
};

/// Non-convergence of inverse iteration; what() carries the residual history.
class EigenError : public Error {
public:
    using Error::Error;
};

/// The k smallest eigenpairs. Residuals must reach tol·max(1, ‖T‖∞).
EigenPairs eigen_smallest(const Tridiagonal& t, std::size_t k, double tol = 1e-13);

/// Solves (T − shift I) x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_shifted(const Tridiagonal& t, double shift, const std::vector<double>& b);

}  // namespace macf
