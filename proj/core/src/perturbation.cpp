#include "qbdr/perturbation.hpp"

#include <limits>

namespace qbdr {

namespace {

constexpr double kClamp = 1e-13;

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& m, ErrorCategory category, const char* what) {
    Eigen::PartialPivLU<Matrix> lu(m);
    if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) {
        throw Error(category, std::string(what) + " is numerically singular");
    }
    return lu;
}

RowVector clamp_normalize(RowVector pi) {
    for (Eigen::Index i = 0; i < pi.size(); ++i) {
        if (pi(i) < 0.0) {
            if (pi(i) < -kClamp) {
                throw Error(ErrorCategory::NumericalRank, "stationary vector has a significantly negative entry");
            }
            pi(i) = 0.0;
        }
    }
    return pi / pi.sum();
}

// Stationary vector of a small irreducible generator.
RowVector dense_stationary(const Matrix& Q) {
    Matrix M = Q;
    M.col(M.cols() - 1).setOnes();
    RowVector e = RowVector::Zero(Q.cols());
    e(e.size() - 1) = 1.0;
    const auto lu = checked_lu(M.transpose(), ErrorCategory::NumericalRank, "base generator");
    return clamp_normalize(lu.solve(e.transpose()).transpose());
}

QbdBlocks at_capacity(const QbdBlocks& b, int c) { return b.with_capacity(c); }

} // namespace

BlockUpdate ladder_update(const QbdBlocks& b, int c) {
    if (c < 2) throw Error(ErrorCategory::Parameter, "ladder updates start at capacity 2");
    const int n = b.n;
    BlockUpdate u;
    u.K = c - 1;
    u.P = Matrix::Zero(n, n * (c + 1));
    u.P.middleCols((c - 1) * n, n) = b.A0 - b.C0;
    u.P.middleCols(c * n, n) = b.A1;
    return u;
}

Matrix t_matrix(const QbdBlocks& b, int c) {
    if (c < 2) throw Error(ErrorCategory::Parameter, "T is defined from capacity 2");
    const int n = b.n;
    Matrix T = Matrix::Zero(n * (c + 1), n * (c + 1));
    T.topLeftCorner(n * c, n * c) = assemble_generator(at_capacity(b, c - 1));
    T.block(c * n, (c - 1) * n, n, n) = b.A_minus1;
    T.block(c * n, c * n, n, n) = b.C0;
    return T;
}

Matrix t_group_inverse(const Matrix& dev_prev, const RowVector& pi_prev, const QbdBlocks& b) {
    const int n = b.n;
    const Eigen::Index Np = dev_prev.rows();
    if (dev_prev.cols() != Np || pi_prev.size() != Np || Np % n != 0) {
        throw Error(ErrorCategory::Structural, "previous rung has inconsistent dimensions");
    }
    const auto lu = checked_lu(b.C0, ErrorCategory::Structural, "C0");
    // M D' - 1 pi' with M = [0 ... A-1]
    Matrix lower = b.A_minus1 * dev_prev.bottomRows(n);
    lower.rowwise() -= pi_prev;

    Matrix X = Matrix::Zero(Np + n, Np + n);
    X.topLeftCorner(Np, Np) = -dev_prev;
    X.bottomLeftCorner(n, Np) = lu.solve(lower);
    X.bottomRightCorner(n, n) = lu.inverse();
    return X;
}

RowVector pi_step(const RowVector& pi_prev, const Matrix& t_sharp, const BlockUpdate& u) {
    const auto n = u.P.rows();
    const Eigen::Index N = t_sharp.rows();
    if (pi_prev.size() + n != N || u.P.cols() != N) {
        throw Error(ErrorCategory::Structural, "ladder step has inconsistent dimensions");
    }
    RowVector phi = RowVector::Zero(N);
    phi.head(pi_prev.size()) = pi_prev;
    const Matrix PT = u.P * t_sharp;                      // Delta T^#
    const Matrix inner = Matrix::Identity(n, n) + PT.middleCols(u.K * n, n);
    const auto lu = checked_lu(inner.transpose(), ErrorCategory::NumericalRank, "I + Delta T# E");
    const RowVector phiE = phi.segment(u.K * n, n);
    const RowVector coeff = lu.solve(phiE.transpose()).transpose();
    return clamp_normalize(phi - coeff * PT);
}

Matrix deviation_update(const Matrix& D, const RowVector& pi_new, const BlockUpdate& u) {
    const auto n = u.P.rows();
    const Matrix PD = u.P * D;
    const Matrix DE = D.middleCols(u.K * n, n);
    const Matrix inner = Matrix::Identity(n, n) - PD.middleCols(u.K * n, n);
    const auto lu = checked_lu(inner, ErrorCategory::NumericalRank, "I - P D E");
    Matrix out = D + DE * lu.solve(PD);
    const RowVector weight = pi_new * out;
    out -= Vector::Ones(out.rows()) * weight;
    return out;
}

Matrix deviation_update_full(const Matrix& D, const RowVector& pi_new, const BlockUpdate& u) {
    const auto n = u.P.rows();
    const Eigen::Index N = D.rows();
    Matrix EPD = Matrix::Zero(N, N);
    EPD.middleRows(u.K * n, n) = u.P * D;
    // D (I - EPD)^{-1} = ((I - EPD)^{-T} D^T)^T
    const auto lu = checked_lu((Matrix::Identity(N, N) - EPD).transpose(), ErrorCategory::NumericalRank,
                               "I - E P D");
    const Matrix left = Matrix::Identity(N, N) - Vector::Ones(N) * pi_new;
    return left * lu.solve(D.transpose()).transpose();
}

CapacityLadderState ladder_base(const QbdBlocks& b) {
    const Matrix Q = assemble_generator(at_capacity(b, 1));
    CapacityLadderState st;
    st.capacity = 1;
    st.pi = dense_stationary(Q);
    const Matrix W = Vector::Ones(Q.rows()) * st.pi;
    const auto lu = checked_lu(W - Q, ErrorCategory::NumericalRank, "1 pi - Q");
    st.dev = lu.inverse() - W;
    return st;
}

CapacityLadderState ladder_step(const QbdBlocks& b, const CapacityLadderState& prev) {
    const int c = prev.capacity + 1;
    try {
        const Matrix t_sharp = t_group_inverse(prev.dev, prev.pi, b);
        const BlockUpdate u = ladder_update(b, c);
        CapacityLadderState st;
        st.capacity = c;
        st.pi = pi_step(prev.pi, t_sharp, u);
        st.dev = deviation_update(-t_sharp, st.pi, u);
        return st;
    } catch (const Error& e) {
        throw Error(e.category(), "capacity ladder failed at rung " + std::to_string(c) + ": " + e.what());
    }
}

DeviationResult deviation_recursive(const QbdBlocks& b) {
    CapacityLadderState st = ladder_base(b);
    while (st.capacity < b.C) st = ladder_step(b, st);
    DeviationResult out;
    out.method = DeviationMethod::Perturbation;
    out.matrix = std::move(st.dev);
    return out;
}

ResolventResult resolvent_recursive(const QbdBlocks& b, double s) {
    if (!(s > 0.0)) throw Error(ErrorCategory::Precondition, "transform variable must be > 0");
    const int n = b.n;
    const Matrix I = Matrix::Identity(n, n);

    Matrix Q1 = assemble_generator(at_capacity(b, 1));
    const Eigen::Index N1 = Q1.rows();
    Matrix Y = checked_lu(s * Matrix::Identity(N1, N1) - Q1, ErrorCategory::Singular, "sI - Q")
                   .inverse();
    const auto lu_c0 = checked_lu(s * I - b.C0, ErrorCategory::Singular, "sI - C0");
    const Matrix Cinv = lu_c0.inverse();

    for (int c = 2; c <= b.C; ++c) {
        const Eigen::Index Np = Y.rows();
        const Eigen::Index N = Np + n;
        // (sI - T)^{-1}
        Matrix X = Matrix::Zero(N, N);
        X.topLeftCorner(Np, Np) = Y;
        X.bottomLeftCorner(n, Np) = Cinv * (b.A_minus1 * Y.bottomRows(n));
        X.bottomRightCorner(n, n) = Cinv;
        // SMW with U = E_{c-1}, V = Delta
        const BlockUpdate u = ladder_update(b, c);
        const Matrix DX = u.P * X;
        const Matrix XE = X.middleCols((c - 1) * n, n);
        const auto lu = checked_lu(I - DX.middleCols((c - 1) * n, n), ErrorCategory::NumericalRank,
                                   "I - Delta (sI - T)^{-1} E");
        Y = X + XE * lu.solve(DX);
    }

    ResolventResult out;
    out.resolvent = std::move(Y);
    out.pi = dense_stationary(assemble_generator(b));
    const Eigen::Index N = out.resolvent.rows();
    out.deviation_transform = out.resolvent / s - Vector::Ones(N) * out.pi / (s * s);
    return out;
}

} // namespace qbdr
