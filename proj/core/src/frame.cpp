#include "macf/frame.hpp"

#include <cmath>
#include <string>

#include "macf/matcore.hpp"

namespace macf {

UnitVector::UnitVector(Vector v) : v_(std::move(v)) {
    if (v_.size() < 2) throw DimensionError("UnitVector: dimension must be at least 2");
    if (std::abs(v_.norm() - 1.0) > kUnitTol) {
        throw DomainError("UnitVector: norm " + std::to_string(v_.norm()) + " is not 1");
    }
}

UnitVector UnitVector::normalized(const Vector& v) {
    const double nv = v.norm();
    if (!(nv > 1e-300) || !std::isfinite(nv)) throw DomainError("UnitVector: cannot normalize a zero vector");
    return UnitVector(v / nv);
}

UnitVector UnitVector::basis(std::size_t n, std::size_t i) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(i)) = 1.0;
    return UnitVector(e);
}

SquareMatrix UnitVector::reflector(double s) const {
    SquareMatrix r = SquareMatrix::identity(dim());
    r.eigen() -= 2.0 * s * v_ * v_.transpose();
    return r;
}

SquareMatrix FrameDecomposition::sum() const {
    SquareMatrix s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += parts[i];
    return s;
}

namespace {

void check_index(int i) {
    if (i < 1 || i > 5) throw DomainError("frame: subspace index must be in 1..5, got " + std::to_string(i));
}

}  // namespace

SquareMatrix project(int i, const SquareMatrix& a, const UnitVector& n) {
    check_index(i);
    if (a.dim() != n.dim()) throw DimensionError("project: matrix and direction sizes differ");
    const auto nd = static_cast<Eigen::Index>(n.dim());
    const RowMajorMatrix N = n.vec() * n.vec().transpose();
    const RowMajorMatrix Q = RowMajorMatrix::Identity(nd, nd) - N;
    const auto& A = a.eigen();
    RowMajorMatrix out;
    switch (i) {
        case 1:
            out = N * A * N;
            break;
        case 2: {
            const RowMajorMatrix S = A + A.transpose();
            out = 0.5 * (N * S * Q + Q * S * N);
            break;
        }
        case 3: {
            const RowMajorMatrix W = A - A.transpose();
            out = 0.5 * (N * W * Q + Q * W * N);
            break;
        }
        case 4:
            out = 0.5 * Q * (A - A.transpose()) * Q;
            break;
        default:
            out = 0.5 * Q * (A + A.transpose()) * Q;
            break;
    }
    return SquareMatrix(std::move(out));
}

FrameDecomposition decompose(const SquareMatrix& a, const UnitVector& n) {
    return FrameDecomposition{
        {project(1, a, n), project(2, a, n), project(3, a, n), project(4, a, n), project(5, a, n)}, n};
}

double kappa(int i, double s) {
    check_index(i);
    switch (i) {
        case 1: return 2.0 * (1.0 - 6.0 * s + 6.0 * s * s);
        case 2: return 2.0 * (1.0 - s) * (1.0 - 2.0 * s);
        case 3: return 2.0 * s * (2.0 * s - 1.0);
        case 4: return 0.0;
        default: return 2.0;
    }
}

std::size_t subspace_dim(int i, std::size_t n) {
    check_index(i);
    switch (i) {
        case 1: return 1;
        case 2:
        case 3: return n - 1;
        case 4: return (n - 1) * (n - 2) / 2;
        default: return n * (n - 1) / 2;
    }
}

double ConjugationResiduals::max() const { return std::max({p2_to_p3, p3_to_p2, p4_fixed}); }

ConjugationResiduals reflect_conjugation_check(const SquareMatrix& a, const UnitVector& n) {
    const SquareMatrix r = n.reflector();
    const SquareMatrix ra = r * a;
    const SquareMatrix p4 = project(4, a, n);
    ConjugationResiduals out{};
    out.p2_to_p3 = (r * project(2, a, n) - project(3, ra, n)).norm();
    out.p3_to_p2 = (r * project(3, a, n) - project(2, ra, n)).norm();
    out.p4_fixed = (project(4, ra, n) - r * p4).norm() + (r * p4 - p4).norm();
    return out;
}

double bulk_quadratic_form(double s, const SquareMatrix& b, const UnitVector& n, double tol) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("bulk_quadratic_form: s must lie in [0,1]");
    const double direct = frobenius(linearized_H(n.reflector(s), b), b);
    double diag = 0.0;
    for (int i = 1; i <= 5; ++i) {
        const SquareMatrix p = project(i, b, n);
        diag += kappa(i, s) * frobenius(p, p);
    }
    if (std::abs(direct - diag) > tol * (1.0 + std::abs(direct))) {
        throw IdentityViolation("bulk_quadratic_form: H_{P0}B:B = " + std::to_string(direct) +
                                " but diagonal form gives " + std::to_string(diag));
    }
    return direct;
}

std::vector<SquareMatrix> subspace_basis(int i, const UnitVector& n) {
    check_index(i);
    const auto nd = static_cast<Eigen::Index>(n.dim());
    // Orthonormal complement of n from a Householder QR of [n | I].
    RowMajorMatrix seed(nd, nd + 1);
    seed.col(0) = n.vec();
    seed.rightCols(nd).setIdentity();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(seed).householderQ();
    std::vector<Vector> perp;
    for (Eigen::Index k = 1; k < nd; ++k) perp.emplace_back(q.col(k));

    const Vector& nv = n.vec();
    const double r2 = 1.0 / std::sqrt(2.0);
    std::vector<SquareMatrix> out;
    switch (i) {
        case 1:
            out.push_back(n.outer());
            break;
        case 2:
            for (const auto& l : perp) out.emplace_back(RowMajorMatrix(r2 * (nv * l.transpose() + l * nv.transpose())));
            break;
        case 3:
            for (const auto& l : perp) out.emplace_back(RowMajorMatrix(r2 * (nv * l.transpose() - l * nv.transpose())));
            break;
        case 4:
            for (std::size_t a = 0; a < perp.size(); ++a)
                for (std::size_t b = a + 1; b < perp.size(); ++b)
                    out.emplace_back(RowMajorMatrix(r2 * (perp[a] * perp[b].transpose() - perp[b] * perp[a].transpose())));
            break;
        default:
            for (std::size_t a = 0; a < perp.size(); ++a) {
                out.emplace_back(RowMajorMatrix(perp[a] * perp[a].transpose()));
                for (std::size_t b = a + 1; b < perp.size(); ++b)
                    out.emplace_back(RowMajorMatrix(r2 * (perp[a] * perp[b].transpose() + perp[b] * perp[a].transpose())));
            }
            break;
    }
    return out;
}

}  // namespace macf
