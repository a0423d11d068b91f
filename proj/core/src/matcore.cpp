#include "macf/matcore.hpp"

#include <cmath>

#include <Eigen/LU>

namespace macf {

SquareMatrix::SquareMatrix(std::size_t n) : m_(RowMajorMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))) {
    if (n < 2) throw DimensionError("SquareMatrix: n must be at least 2");
}

SquareMatrix::SquareMatrix(RowMajorMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionError("SquareMatrix: matrix is not square");
    if (m_.rows() < 2) throw DimensionError("SquareMatrix: n must be at least 2");
}

SquareMatrix::SquareMatrix(std::size_t n, std::initializer_list<double> row_major) : SquareMatrix(n) {
    if (row_major.size() != n * n) throw DimensionError("SquareMatrix: expected n*n entries");
    std::size_t k = 0;
    for (double v : row_major) m_.data()[k++] = v;
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
    SquareMatrix m(n);
    m.m_.setIdentity();
    return m;
}

SquareMatrix SquareMatrix::outer(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("outer: vector sizes differ");
    return SquareMatrix(RowMajorMatrix(a * b.transpose()));
}

SquareMatrix SquareMatrix::from_row_major(std::size_t n, std::span<const double> values) {
    if (values.size() != n * n) throw DimensionError("from_row_major: expected n*n entries");
    SquareMatrix m(n);
    std::copy(values.begin(), values.end(), m.m_.data());
    return m;
}

SquareMatrix& SquareMatrix::operator+=(const SquareMatrix& o) {
    require_same_dim(*this, o, "operator+");
    m_ += o.m_;
    return *this;
}

SquareMatrix& SquareMatrix::operator-=(const SquareMatrix& o) {
    require_same_dim(*this, o, "operator-");
    m_ -= o.m_;
    return *this;
}

SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_dim(a, b, "operator*");
    return SquareMatrix(RowMajorMatrix(a.m_ * b.m_));
}

void require_same_dim(const SquareMatrix& a, const SquareMatrix& b, const char* where) {
    if (a.dim() != b.dim()) {
        throw DimensionError(std::string(where) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                             std::to_string(b.dim()) + ")");
    }
}

double frobenius(const SquareMatrix& a, const SquareMatrix& b) {
    require_same_dim(a, b, "frobenius");
    return a.eigen().cwiseProduct(b.eigen()).sum();
}

SquareMatrix f_cubic(const SquareMatrix& a) {
    const auto& m = a.eigen();
    return SquareMatrix(RowMajorMatrix(m * m.transpose() * m - m));
}

double potential_F(const SquareMatrix& a) {
    const auto& m = a.eigen();
    const RowMajorMatrix g = m.transpose() * m - RowMajorMatrix::Identity(m.rows(), m.cols());
    return 0.25 * g.squaredNorm();
}

SquareMatrix linearized_H(const SquareMatrix& b, const SquareMatrix& a) {
    require_same_dim(b, a, "linearized_H");
    const auto& B = b.eigen();
    const auto& A = a.eigen();
    return SquareMatrix(RowMajorMatrix(B * B.transpose() * A + A * B.transpose() * B + B * A.transpose() * B - A));
}

SquareMatrix trilinear_Tf(const SquareMatrix& a1, const SquareMatrix& a2, const SquareMatrix& a3) {
    require_same_dim(a1, a2, "trilinear_Tf");
    require_same_dim(a1, a3, "trilinear_Tf");
    const auto& A1 = a1.eigen();
    const auto& A2 = a2.eigen();
    const auto& A3 = a3.eigen();
    RowMajorMatrix out = (A1 * A2.transpose() + A2 * A1.transpose()) * A3;
    out += A3 * (A1.transpose() * A2 + A2.transpose() * A1);
    out += A1 * A3.transpose() * A2 + A2 * A3.transpose() * A1;
    return SquareMatrix(std::move(out));
}

SymAsymSplit sym_asym_split(const SquareMatrix& a) {
    const auto& m = a.eigen();
    return {SquareMatrix(RowMajorMatrix(0.5 * (m + m.transpose()))),
            SquareMatrix(RowMajorMatrix(0.5 * (m - m.transpose())))};
}

double orthogonality_defect(const SquareMatrix& a) {
    const auto& m = a.eigen();
    return (m.transpose() * m - RowMajorMatrix::Identity(m.rows(), m.cols())).norm();
}

double determinant(const SquareMatrix& a) {
    if (a.dim() == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return Eigen::PartialPivLU<RowMajorMatrix>(a.eigen()).determinant();
}

int det_sign(const SquareMatrix& a, double zero_tol) {
    const double d = Eigen::PartialPivLU<RowMajorMatrix>(a.eigen()).determinant();
    if (!(std::abs(d) >= zero_tol)) return 0;
    return d > 0.0 ? 1 : -1;
}

}  // namespace macf
