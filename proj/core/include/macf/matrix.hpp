#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "macf/error.hpp"

namespace macf {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Dense real n×n matrix (n ≥ 2), row-major. Value type for A, B, P, Φ, Θ.
class SquareMatrix {
public:
    SquareMatrix() : SquareMatrix(2) {}
    explicit SquareMatrix(std::size_t n);
    explicit SquareMatrix(RowMajorMatrix m);
    SquareMatrix(std::size_t n, std::initializer_list<double> row_major);

    static SquareMatrix zero(std::size_t n) { return SquareMatrix(n); }
    static SquareMatrix identity(std::size_t n);
    /// a bᵀ
    static SquareMatrix outer(const Vector& a, const Vector& b);
    static SquareMatrix from_row_major(std::size_t n, std::span<const double> values);

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

    double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
    double& operator()(std::size_t r, std::size_t c) { return m_(r, c); }

    const RowMajorMatrix& eigen() const { return m_; }
    RowMajorMatrix& eigen() { return m_; }

    std::span<const double> row_major() const { return {m_.data(), static_cast<std::size_t>(m_.size())}; }
    std::span<double> row_major() { return {m_.data(), static_cast<std::size_t>(m_.size())}; }

    SquareMatrix transpose() const { return SquareMatrix(RowMajorMatrix(m_.transpose())); }
    double norm() const { return m_.norm(); }
    double max_abs() const { return m_.cwiseAbs().maxCoeff(); }
    bool all_finite() const { return m_.allFinite(); }

    SquareMatrix& operator+=(const SquareMatrix& o);
    SquareMatrix& operator-=(const SquareMatrix& o);
    SquareMatrix& operator*=(double a) { m_ *= a; return *this; }

    friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
    friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
    friend SquareMatrix operator-(const SquareMatrix& a) { return SquareMatrix(RowMajorMatrix(-a.m_)); }
    friend SquareMatrix operator*(double s, SquareMatrix a) { return a *= s; }
    friend SquareMatrix operator*(SquareMatrix a, double s) { return a *= s; }
    friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b);

private:
    RowMajorMatrix m_;
};

/// Throws DimensionError unless a and b have the same n.
void require_same_dim(const SquareMatrix& a, const SquareMatrix& b, const char* where);

}  // namespace macf
