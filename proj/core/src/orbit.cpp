#include "macf/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "macf/matcore.hpp"
#include "macf/quadrature.hpp"

namespace macf {

namespace {

constexpr double kCutLocusTol = 1e-6;
constexpr double kOrthoTol = 1e-8;

void require_phase(const SquareMatrix& a, int sign, const char* what) {
    if (orthogonality_defect(a) > kOrthoTol) throw DomainError(std::string(what) + ": matrix is not orthogonal");
    if (det_sign(a) != sign)
        throw DomainError(std::string(what) + (sign > 0 ? ": expected det +1" : ": expected det -1"));
}

}  // namespace

double s_profile(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-kSqrt2 * z));
    const double e = std::exp(kSqrt2 * z);
    return e / (1.0 + e);
}

SDerivs s_derivs(double z) {
    SDerivs d{};
    d.s = s_profile(z);
    d.one_minus_s = s_profile(-z);
    const double sm = d.s * d.one_minus_s;
    d.d1 = kSqrt2 * sm;
    d.d2 = 2.0 * sm * (d.one_minus_s - d.s);
    d.d3 = 2.0 * (1.0 - 6.0 * sm) * d.d1;
    return d;
}

std::vector<double> uniform_grid(double half_width, std::size_t points) {
    if (!(half_width > 0.0) || points < 2) throw DomainError("uniform_grid: need half_width > 0 and >= 2 points");
    std::vector<double> z(points);
    const double h = 2.0 * half_width / static_cast<double>(points - 1);
    for (std::size_t j = 0; j < points; ++j) z[j] = -half_width + h * static_cast<double>(j);
    if (points % 2 == 1) z[points / 2] = 0.0;
    return z;
}

Profile::Profile(std::vector<double> z, std::vector<SquareMatrix> samples, SquareMatrix limit_minus,
                 SquareMatrix limit_plus, double decay_rate)
    : z_(std::move(z)),
      samples_(std::move(samples)),
      limit_minus_(std::move(limit_minus)),
      limit_plus_(std::move(limit_plus)),
      decay_rate_(decay_rate) {
    if (z_.size() < 2 || z_.size() != samples_.size()) throw DimensionError("Profile: grid and samples disagree");
    if (!(decay_rate_ > 0.0)) throw DomainError("Profile: decay rate must be positive");
    for (std::size_t j = 1; j < z_.size(); ++j)
        if (!(z_[j] > z_[j - 1])) throw DomainError("Profile: grid must be strictly increasing");
    for (const auto& a : samples_) {
        require_same_dim(a, samples_.front(), "Profile");
        if (!a.all_finite()) throw DomainError("Profile: non-finite sample");
    }
    require_same_dim(limit_minus_, samples_.front(), "Profile");
    require_same_dim(limit_plus_, samples_.front(), "Profile");
    const double left = (samples_.front() - limit_minus_).norm() * std::exp(decay_rate_ * std::abs(z_.front()));
    const double right = (samples_.back() - limit_plus_).norm() * std::exp(decay_rate_ * std::abs(z_.back()));
    tail_constant_ = std::max(left, right);
}

double Profile::spacing() const { return quad::uniform_spacing(z_); }

std::vector<double> Profile::entry(std::size_t r, std::size_t c) const {
    std::vector<double> out(samples_.size());
    for (std::size_t j = 0; j < samples_.size(); ++j) out[j] = samples_[j](r, c);
    return out;
}

void write_profile_csv(std::ostream& os, const Profile& p) {
    const std::size_t n = p.dim();
    os << "z";
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) os << ",a" << r << c;
    os << '\n' << std::setprecision(17);
    for (std::size_t j = 0; j < p.size(); ++j) {
        os << p.z()[j];
        for (double v : p[j].row_major()) os << ',' << v;
        os << '\n';
    }
}

void write_profile_csv(const std::string& path, const Profile& p) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path);
    write_profile_csv(os, p);
}

MinimalPair MinimalPair::from_plus(const SquareMatrix& a_plus, const UnitVector& n) {
    return MinimalPair(a_plus * n.reflector(), a_plus, n);
}

MinimalPair::MinimalPair(SquareMatrix a_minus, SquareMatrix a_plus, UnitVector n, double tol)
    : a_minus_(std::move(a_minus)), a_plus_(std::move(a_plus)), n_(std::move(n)) {
    require_same_dim(a_minus_, a_plus_, "MinimalPair");
    if (n_.dim() != a_plus_.dim()) throw DimensionError("MinimalPair: direction has wrong length");
    require_phase(a_plus_, +1, "MinimalPair a_plus");
    require_phase(a_minus_, -1, "MinimalPair a_minus");
    if ((a_minus_ - a_plus_ * n_.reflector()).norm() > tol)
        throw DomainError("MinimalPair: a_minus != a_plus (I - 2nn)");
    if (std::abs((a_minus_ - a_plus_).norm() - 2.0) > tol) throw DomainError("MinimalPair: distance is not 2");
}

Vector canonical_sign(Vector v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12) {
            if (v(i) < 0.0) v = -v;
            break;
        }
    }
    return v;
}

std::optional<UnitVector> is_minimal_pair(const SquareMatrix& a_minus, const SquareMatrix& a_plus, double tol) {
    require_same_dim(a_minus, a_plus, "is_minimal_pair");
    if (orthogonality_defect(a_minus) > tol || orthogonality_defect(a_plus) > tol)
        throw DomainError("is_minimal_pair: inputs must be orthogonal");
    if (det_sign(a_minus) != -1 || det_sign(a_plus) != 1)
        throw DomainError("is_minimal_pair: expected det(a_minus) = -1, det(a_plus) = +1");
    const RowMajorMatrix m = a_plus.eigen().transpose() * a_minus.eigen();
    const double scale = static_cast<double>(a_plus.dim());
    if ((m - m.transpose()).norm() > tol * scale) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    const Vector v = canonical_sign(es.eigenvectors().col(0));
    UnitVector n = UnitVector::normalized(v);
    if ((SquareMatrix(m) - n.reflector()).norm() > tol * scale) return std::nullopt;
    return n;
}

NearestPartner nearest_minimal_partner(const SquareMatrix& a_plus, const SquareMatrix& b) {
    require_same_dim(a_plus, b, "nearest_minimal_partner");
    require_phase(a_plus, +1, "nearest_minimal_partner a_plus");
    const RowMajorMatrix g = a_plus.eigen().transpose() * (a_plus.eigen() - b.eigen());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
    const Eigen::Index top = es.eigenvalues().size() - 1;
    const double gap = es.eigenvalues()(top) - es.eigenvalues()(top - 1);
    const bool degenerate = gap <= 1e-12 * std::max(1.0, std::abs(es.eigenvalues()(top)));
    const UnitVector n = UnitVector::normalized(canonical_sign(es.eigenvectors().col(top)));
    return {MinimalPair::from_plus(a_plus, n), degenerate};
}

SquareMatrix theta0(const MinimalPair& pair, double z) {
    const double s = s_profile(z);
    return s * pair.a_plus() + s_profile(-z) * pair.a_minus();
}

Profile theta0_profile(const MinimalPair& pair, const std::vector<double>& z) {
    std::vector<SquareMatrix> samples;
    samples.reserve(z.size());
    for (double zj : z) samples.push_back(theta0(pair, zj));
    return Profile(z, std::move(samples), pair.a_minus(), pair.a_plus());
}

double line_energy(const Profile& theta) {
    const double h = theta.spacing();
    const std::size_t n = theta.dim();
    std::vector<double> density(theta.size(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const auto d = quad::derivative(theta.entry(r, c), h);
            for (std::size_t j = 0; j < d.size(); ++j) density[j] += 0.5 * d[j] * d[j];
        }
    }
    for (std::size_t j = 0; j < theta.size(); ++j) density[j] += potential_F(theta[j]);
    return quad::integrate(density, h);
}

Geodesic::Geodesic(const SquareMatrix& phi_minus, const SquareMatrix& phi_plus)
    : phi_minus_(phi_minus), x_(phi_minus.dim()) {
    require_same_dim(phi_minus, phi_plus, "geodesic_Ominus");
    require_phase(phi_minus, -1, "geodesic_Ominus phi_minus");
    require_phase(phi_plus, -1, "geodesic_Ominus phi_plus");
    const Eigen::MatrixXd r = phi_minus.eigen().transpose() * phi_plus.eigen();
    Eigen::RealSchur<Eigen::MatrixXd> schur(r);
    const Eigen::MatrixXd& t = schur.matrixT();
    schur_basis_ = schur.matrixU();
    const std::size_t n = phi_minus.dim();
    RowMajorMatrix gen = RowMajorMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n;) {
        const auto ik = static_cast<Eigen::Index>(k);
        const bool pair = k + 1 < n && std::abs(t(ik + 1, ik)) > 1e-14;
        if (!pair) {
            if (std::abs(t(ik, ik) + 1.0) < kCutLocusTol)
                throw DomainError("geodesic_Ominus: cut locus (eigenvalue -1 in phi_minus^T phi_plus)");
            ++k;
            continue;
        }
        const double c = 0.5 * (t(ik, ik) + t(ik + 1, ik + 1));
        const double sn = 0.5 * (t(ik + 1, ik) - t(ik, ik + 1));
        const double angle = std::atan2(sn, c);
        if (2.0 * std::abs(std::cos(0.5 * angle)) < kCutLocusTol)
            throw DomainError("geodesic_Ominus: cut locus (eigenvalue near -1 in phi_minus^T phi_plus)");
        block_start_.push_back(k);
        block_angle_.push_back(angle);
        gen(ik, ik + 1) = -angle;
        gen(ik + 1, ik) = angle;
        k += 2;
    }
    RowMajorMatrix x = schur_basis_ * gen * schur_basis_.transpose();
    x_ = SquareMatrix(RowMajorMatrix(0.5 * (x - x.transpose())));
}

RowMajorMatrix Geodesic::exp_tx(double tau) const {
    const auto n = static_cast<Eigen::Index>(phi_minus_.dim());
    RowMajorMatrix b = RowMajorMatrix::Identity(n, n);
    for (std::size_t k = 0; k < block_start_.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(block_start_[k]);
        const double a = tau * block_angle_[k];
        b(i, i) = std::cos(a);
        b(i, i + 1) = -std::sin(a);
        b(i + 1, i) = std::sin(a);
        b(i + 1, i + 1) = std::cos(a);
    }
    return schur_basis_ * b * schur_basis_.transpose();
}

SquareMatrix Geodesic::at(double tau) const {
    return SquareMatrix(RowMajorMatrix(phi_minus_.eigen() * exp_tx(tau)));
}

SquareMatrix Geodesic::velocity(double tau) const { return at(tau) * x_; }

SquareMatrix Geodesic::acceleration(double tau) const { return at(tau) * (x_ * x_); }

SquareMatrix geodesic_Ominus(const SquareMatrix& phi_minus, const SquareMatrix& phi_plus, double tau) {
    return Geodesic(phi_minus, phi_plus).at(tau);
}

SquareMatrix QuasiOrbit::phi_at(double z) const { return geodesic.at(s_profile(z)); }

SquareMatrix QuasiOrbit::dphi_at(double z) const {
    const SDerivs d = s_derivs(z);
    return d.d1 * geodesic.velocity(d.s);
}

SquareMatrix QuasiOrbit::d2phi_at(double z) const {
    const SDerivs d = s_derivs(z);
    return (d.d1 * d.d1) * geodesic.acceleration(d.s) + d.d2 * geodesic.velocity(d.s);
}

SquareMatrix QuasiOrbit::theta_at(double z) const { return phi_at(z) * direction.reflector(s_profile(z)); }

SquareMatrix QuasiOrbit::dtheta_at(double z) const {
    const SDerivs d = s_derivs(z);
    const SquareMatrix nn = direction.outer();
    return dphi_at(z) * direction.reflector(d.s) - 2.0 * d.d1 * (phi_at(z) * nn);
}

SquareMatrix QuasiOrbit::d2theta_at(double z) const {
    const SDerivs d = s_derivs(z);
    const SquareMatrix nn = direction.outer();
    return d2phi_at(z) * direction.reflector(d.s) - 4.0 * d.d1 * (dphi_at(z) * nn) -
           2.0 * d.d2 * (phi_at(z) * nn);
}

QuasiOrbit quasi_orbit(const SquareMatrix& a_minus, const SquareMatrix& a_plus, const UnitVector& n,
                       const std::vector<double>& z) {
    require_same_dim(a_minus, a_plus, "quasi_orbit");
    if (n.dim() != a_plus.dim()) throw DimensionError("quasi_orbit: direction has wrong length");
    require_phase(a_minus, -1, "quasi_orbit a_minus");
    require_phase(a_plus, +1, "quasi_orbit a_plus");
    const SquareMatrix phi_plus = a_plus * n.reflector();
    Geodesic g(a_minus, phi_plus);
    std::vector<SquareMatrix> phi;
    std::vector<SquareMatrix> theta;
    phi.reserve(z.size());
    theta.reserve(z.size());
    double c0 = 0.0;
    double c1 = 0.0;
    for (double zj : z) {
        const SDerivs d = s_derivs(zj);
        SquareMatrix p = g.at(d.s);
        const double w = std::exp(kSqrt2 * std::abs(zj));
        c0 = std::max(c0, (p - (zj < 0.0 ? a_minus : phi_plus)).norm() * w);
        c1 = std::max(c1, d.d1 * g.speed() * w);
        theta.push_back(p * n.reflector(d.s));
        phi.push_back(std::move(p));
    }
    Profile phi_profile(z, std::move(phi), a_minus, phi_plus);
    Profile theta_profile(z, std::move(theta), a_minus, a_plus);
    return QuasiOrbit{std::move(g), n, a_minus, phi_plus, std::move(phi_profile), std::move(theta_profile), c0, c1};
}

}  // namespace macf
