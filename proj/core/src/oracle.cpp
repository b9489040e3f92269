#include "qbdr/oracle.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace qbdr::oracle {

namespace {

void require_generator(const Matrix& Q, const OracleConfig& config) {
    if (Q.rows() != Q.cols() || Q.rows() == 0) {
        throw Error(ErrorCategory::Structural, "generator must be square and non-empty");
    }
    if (Q.rows() > config.max_states) {
        throw Error(ErrorCategory::Precondition, "oracle size cap exceeded (" + std::to_string(Q.rows()) +
                                                     " > " + std::to_string(config.max_states) + " states)");
    }
}

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCategory::Precondition, "time must be >= 0");
}

double scale(const Matrix& Q) { return std::max(1.0, max_abs(Q)); }

} // namespace

Matrix expm(const Matrix& A) { return A.exp(); }

RowVector stationary(const Matrix& Q, const OracleConfig& config) {
    require_generator(Q, config);
    const Eigen::Index N = Q.rows();
    Eigen::FullPivLU<Matrix> lu(Q.transpose());
    lu.setThreshold(1e3 * std::numeric_limits<double>::epsilon() * static_cast<double>(N));
    if (lu.rank() != N - 1) {
        throw Error(ErrorCategory::NumericalRank,
                    "generator kernel has dimension " + std::to_string(N - lu.rank()) + ", expected 1");
    }
    RowVector pi = lu.kernel().col(0).transpose();
    pi /= pi.sum();
    // One refinement step against the normalized bordered system.
    Matrix M = Q;
    M.col(N - 1).setOnes();
    Vector e = Vector::Zero(N);
    e(N - 1) = 1.0;
    pi = M.transpose().partialPivLu().solve(e).transpose();
    const double residual = max_abs(pi * Q);
    if (residual > 1e-12 * scale(Q)) {
        throw Error(ErrorCategory::NumericalRank, "stationary residual " + std::to_string(residual));
    }
    return pi;
}

Matrix deviation(const Matrix& Q, const RowVector& pi, const OracleConfig& config) {
    require_generator(Q, config);
    const Eigen::Index N = Q.rows();
    const Matrix W = Vector::Ones(N) * pi;
    const Matrix D = (W - Q).partialPivLu().inverse() - W;
    const double tol = 1e-10 * std::max(1.0, scale(Q) * max_abs(D));
    const double r1 = max_abs(Q * D - (W - Matrix::Identity(N, N)));
    const double r2 = max_abs(pi * D);
    const double r3 = max_abs(D * Vector::Ones(N));
    if (!(r1 <= tol && r2 <= tol && r3 <= tol)) {
        throw Error(ErrorCategory::NumericalRank,
                    "deviation identities fail (QD: " + std::to_string(r1) + ", piD: " + std::to_string(r2) +
                        ", D1: " + std::to_string(r3) + ")");
    }
    return D;
}

Matrix transient_deviation(const Matrix& Q, const RowVector& pi, double t, const OracleConfig& config) {
    require_generator(Q, config);
    require_time(t);
    const Eigen::Index N = Q.rows();
    if (t == 0.0) return Matrix::Zero(N, N);
    const double target = config.quadrature_step / scale(Q);
    auto panels = static_cast<long>(std::ceil(t / target));
    if (panels % 2 != 0) ++panels;
    panels = std::max(panels, 2L);
    const double h = t / static_cast<double>(panels);
    const Matrix step = expm(Q * h);

    Matrix acc = Matrix::Identity(N, N); // weight 1 at u = 0
    Matrix power = Matrix::Identity(N, N);
    for (long i = 1; i <= panels; ++i) {
        power = power * step;
        const double w = (i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * power;
    }
    return acc * (h / 3.0) - Vector::Ones(N) * pi * t;
}

Matrix transient_deviation_closed(const Matrix& Q, const Matrix& D, double t) {
    require_time(t);
    return D - expm(Q * t) * D;
}

Vector reward(const Matrix& Q, const Vector& g, double t, const OracleConfig& config) {
    require_generator(Q, config);
    require_time(t);
    if (g.size() != Q.rows()) throw Error(ErrorCategory::Structural, "reward vector has wrong length");
    Vector R = Vector::Zero(Q.rows());
    if (t == 0.0) return R;
    const double target = config.ode_step / scale(Q);
    const auto steps = std::max(1L, static_cast<long>(std::ceil(t / target)));
    const double h = t / static_cast<double>(steps);
    auto f = [&](const Vector& x) -> Vector { return Q * x + g; };
    for (long i = 0; i < steps; ++i) {
        const Vector k1 = f(R);
        const Vector k2 = f(R + 0.5 * h * k1);
        const Vector k3 = f(R + 0.5 * h * k2);
        const Vector k4 = f(R + h * k3);
        R += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return R;
}

Vector reward_from_deviation(const RowVector& pi, const Matrix& Dt, const Vector& g, double t) {
    return Vector::Constant(g.size(), pi.dot(g) * t) + Dt * g;
}

Vector passage(const Matrix& Q, Eigen::Index target, const OracleConfig& config) {
    require_generator(Q, config);
    const Eigen::Index N = Q.rows();
    if (target < 0 || target >= N) throw Error(ErrorCategory::Parameter, "target state out of range");
    std::vector<Eigen::Index> rest;
    rest.reserve(static_cast<std::size_t>(N - 1));
    for (Eigen::Index i = 0; i < N; ++i) {
        if (i != target) rest.push_back(i);
    }
    Vector out = Vector::Zero(N);
    if (rest.empty()) return out;
    const Matrix taboo = Q(rest, rest);
    Eigen::PartialPivLU<Matrix> lu(taboo);
    if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) {
        throw Error(ErrorCategory::NumericalRank, "taboo generator is singular");
    }
    const Vector m = lu.solve(-Vector::Ones(static_cast<Eigen::Index>(rest.size())));
    for (std::size_t i = 0; i < rest.size(); ++i) out(rest[i]) = m(static_cast<Eigen::Index>(i));
    return out;
}

Matrix resolvent(const Matrix& Q, double s, const OracleConfig& config) {
    require_generator(Q, config);
    const Eigen::Index N = Q.rows();
    return (s * Matrix::Identity(N, N) - Q).partialPivLu().inverse();
}

} // namespace qbdr::oracle
