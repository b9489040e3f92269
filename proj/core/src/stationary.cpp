#include "qbdr/stationary.hpp"

#include <cmath>
#include <limits>

namespace qbdr {

namespace {

constexpr double kClampMagnitude = 1e-13;

// Left null vector of a matrix expected to have a one-dimensional left kernel.
RowVector left_null_vector(const Matrix& K) {
    Eigen::JacobiSVD<Matrix> svd(K, Eigen::ComputeFullU);
    const Vector& sv = svd.singularValues();
    const Eigen::Index m = sv.size();
    const double smax = sv(0);
    const double floor = static_cast<double>(m) * std::numeric_limits<double>::epsilon() * smax;
    if (m >= 2 && sv(m - 2) <= 10.0 * floor) {
        throw Error(ErrorCategory::NumericalRank,
                    "boundary system has a kernel of dimension greater than one");
    }
    return svd.matrixU().col(m - 1).transpose();
}

} // namespace

RowVector StationaryDistribution::stacked() const {
    if (pi.empty()) return {};
    const auto n = pi.front().size();
    RowVector out(n * static_cast<Eigen::Index>(pi.size()));
    for (std::size_t k = 0; k < pi.size(); ++k) out.segment(static_cast<Eigen::Index>(k) * n, n) = pi[k];
    return out;
}

StationaryDistribution StationaryDistribution::from_stacked(const RowVector& pi, int n) {
    StationaryDistribution out;
    const auto levels = pi.size() / n;
    for (Eigen::Index k = 0; k < levels; ++k) out.pi.push_back(pi.segment(k * n, n));
    return out;
}

Matrix stationary_boundary_matrix(const QbdBlocks& b, const RateMatrices& rates) {
    const int n = b.n;
    const Matrix& R = rates.R;
    const Matrix& Rh = rates.Rhat;
    Matrix Rpow = Matrix::Identity(n, n);
    Matrix Rhpow = Matrix::Identity(n, n);
    for (int i = 0; i < b.C - 1; ++i) {
        Rpow = Rpow * R;
        Rhpow = Rhpow * Rh;
    }
    Matrix K(2 * n, 2 * n);
    K.topLeftCorner(n, n) = b.B0 + R * b.A_minus1;
    K.topRightCorner(n, n) = Rpow * (R * b.C0 + b.A1);
    K.bottomLeftCorner(n, n) = Rhpow * (Rh * b.B0 + b.A_minus1);
    K.bottomRightCorner(n, n) = b.C0 + Rh * b.A1;
    return K;
}

StationaryDistribution stationary_rmatrix(const QbdBlocks& b, const SolverConfig& config) {
    return stationary_rmatrix(b, compute_gmatrices(b, 0.0, config));
}

StationaryDistribution stationary_rmatrix(const QbdBlocks& b, const GMatrices& gm) {
    const int n = b.n;
    const int C = b.C;
    const RateMatrices rates = rate_matrices(b, gm.G, gm.Ghat);
    const RowVector x = left_null_vector(stationary_boundary_matrix(b, rates));

    StationaryDistribution out;
    out.v0 = x.head(n);
    out.vC = x.tail(n);

    // v0 R^k for k = 0..C and vC Rhat^j for j = 0..C.
    std::vector<RowVector> up(static_cast<std::size_t>(C + 1)), down(static_cast<std::size_t>(C + 1));
    up[0] = out.v0;
    down[0] = out.vC;
    for (int k = 1; k <= C; ++k) {
        up[k] = up[k - 1] * rates.R;
        down[k] = down[k - 1] * rates.Rhat;
    }
    double total = 0.0;
    for (int k = 0; k <= C; ++k) total += up[k].sum() + down[k].sum();
    if (total == 0.0 || !std::isfinite(total)) {
        throw Error(ErrorCategory::NumericalRank, "stationary boundary vector cannot be normalized");
    }
    out.v0 /= total;
    out.vC /= total;

    out.pi.resize(static_cast<std::size_t>(C + 1));
    double sum = 0.0;
    for (int k = 0; k <= C; ++k) {
        RowVector p = (up[k] + down[C - k]) / total;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (p(i) < 0.0) {
                if (p(i) < -kClampMagnitude) {
                    throw Error(ErrorCategory::NumericalRank,
                                "stationary vector has a significantly negative entry");
                }
                p(i) = 0.0;
            }
        }
        sum += p.sum();
        out.pi[k] = std::move(p);
    }
    for (auto& p : out.pi) p /= sum;
    return out;
}

RowVector UnboundedStationary::level(int k) const {
    RowVector p = pi0;
    for (int i = 0; i < k; ++i) p = p * R;
    return p;
}

UnboundedStationary stationary_unbounded(const QbdBlocks& b, const GMatrices& gm) {
    if (classify_drift(b).tag != DriftTag::PositiveRecurrent) {
        throw Error(ErrorCategory::Precondition,
                    "the unrestricted process has no stationary distribution unless positive recurrent");
    }
    const int n = b.n;
    UnboundedStationary out;
    out.R = rate_matrices(b, gm.G, gm.Ghat).R;
    out.pi0 = left_null_vector(b.B0 + out.R * b.A_minus1);
    const Matrix I = Matrix::Identity(n, n);
    const double mass = (out.pi0 * (I - out.R).partialPivLu().solve(Vector::Ones(n)))(0);
    out.pi0 /= mass;
    return out;
}

} // namespace qbdr
