#include "qbdr/mapph.hpp"

#include <cmath>

#include "qbdr/linalg.hpp"

namespace qbdr {

namespace {

constexpr double kTol = 1e-12;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCategory::Parameter, what); }

void require_square(const Matrix& m, const char* name) {
    if (m.rows() != m.cols() || m.rows() == 0) fail(std::string(name) + " must be square and non-empty");
    if (!m.allFinite()) fail(std::string(name) + " has non-finite entries");
}

void require_offdiag_nonnegative(const Matrix& m, const char* name) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j && m(i, j) < 0.0) fail(std::string(name) + " has a negative off-diagonal entry");
        }
    }
}

PhParams interarrival_law() {
    PhParams ph;
    ph.tau = RowVector(2);
    ph.tau << 0.8, 0.2;
    ph.T = Matrix(2, 2);
    ph.T << -10, 2, 1, -6;
    return ph;
}

PhParams service_law() {
    PhParams ph;
    ph.tau = RowVector(2);
    ph.tau << 0.4, 0.6;
    ph.T = Matrix(2, 2);
    ph.T << -3, 2, 1, -4;
    return ph;
}

} // namespace

void validate_map(const MapParams& map) {
    require_square(map.D0, "D0");
    require_square(map.D1, "D1");
    if (map.D0.rows() != map.D1.rows()) fail("D0 and D1 must have the same order");
    require_offdiag_nonnegative(map.D0, "D0");
    if ((map.D1.array() < 0.0).any()) fail("D1 has a negative entry");
    const Vector rows = (map.D0 + map.D1).rowwise().sum();
    if (rows.cwiseAbs().maxCoeff() > kTol * std::max(1.0, max_abs(map.D0))) {
        fail("rows of D0 + D1 must sum to zero");
    }
}

void validate_ph(const PhParams& ph) {
    require_square(ph.T, "T");
    if (ph.tau.size() != ph.T.rows()) fail("tau and T must have the same order");
    if ((ph.tau.array() < 0.0).any()) fail("tau has a negative entry");
    if (std::abs(ph.tau.sum() - 1.0) > kTol) fail("tau must sum to one");
    require_offdiag_nonnegative(ph.T, "T");
    if ((ph.t_exit().array() < -kTol * std::max(1.0, max_abs(ph.T))).any()) {
        fail("rows of T must have nonpositive sums");
    }
}

QbdBlocks build_blocks(const MapParams& map, const PhParams& ph, int C) {
    validate_map(map);
    validate_ph(ph);
    if (C < 1) fail("capacity must be >= 1");
    const Eigen::Index n1 = map.D0.rows();
    const Eigen::Index n2 = ph.T.rows();
    const Matrix I1 = Matrix::Identity(n1, n1);
    const Matrix I2 = Matrix::Identity(n2, n2);
    // Exit rates below roundoff are zero by definition.
    Vector t = ph.t_exit();
    t = t.cwiseMax(0.0);

    QbdBlocks b;
    b.n = static_cast<int>(n1 * n2);
    b.C = C;
    b.A_minus1 = kron(I1, t * ph.tau);
    b.A0 = kron_sum(map.D0, ph.T);
    b.A1 = kron(map.D1, I2);
    b.B0 = kron(map.D0, I2);
    b.C0 = kron_sum(map.D0 + map.D1, ph.T);
    return b;
}

RewardSpec lost_revenue_rewards(const QbdBlocks& b, double theta) {
    if (!(theta >= 0.0)) fail("theta must be >= 0");
    RewardSpec r = RewardSpec::zero(b.n, b.C);
    r.g[static_cast<std::size_t>(b.C)] = theta * b.A1 * Vector::Ones(b.n);
    return r;
}

RewardSpec gained_revenue_rewards(const QbdBlocks& b, double theta, double gamma) {
    if (!(theta >= 0.0) || !(gamma >= 0.0)) fail("theta and gamma must be >= 0");
    RewardSpec r = RewardSpec::zero(b.n, b.C);
    const Vector entry = theta * b.A1 * Vector::Ones(b.n);
    const Vector one = Vector::Ones(b.n);
    for (int k = 0; k < b.C; ++k) r.g[static_cast<std::size_t>(k)] = entry + gamma * k * one;
    r.g[static_cast<std::size_t>(b.C)] = gamma * b.C * one;
    return r;
}

MapParams renewal_map(const PhParams& interarrival) {
    validate_ph(interarrival);
    return {interarrival.T, interarrival.t_exit() * interarrival.tau};
}

MapParams example_map() { return renewal_map(interarrival_law()); }
PhParams example_ph() { return service_law(); }

MapParams swapped_map() { return renewal_map(service_law()); }
PhParams swapped_ph() { return interarrival_law(); }

} // namespace qbdr
