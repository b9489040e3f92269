#include "qbdr/passage_deviation.hpp"

#include <cmath>

#include <limits>

#include "qbdr/linalg.hpp"

namespace qbdr {

namespace {

void require_target(const QbdBlocks& b, int level, int phase) {
    if (level < 0 || level > b.C) {
        throw Error(ErrorCategory::Parameter, "target level " + std::to_string(level) + " outside 0.." +
                                                  std::to_string(b.C));
    }
    if (phase < 0 || phase >= b.n) {
        throw Error(ErrorCategory::Parameter, "target phase index " + std::to_string(phase) +
                                                  " outside 0.." + std::to_string(b.n - 1));
    }
}

Vector unit(int n, int j) {
    Vector e = Vector::Zero(n);
    e(j) = 1.0;
    return e;
}

// [v, M v, M^2 v, ..., M^{count-1} v]
std::vector<Vector> orbit(const Matrix& M, Vector v, int count) {
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        if (i > 0) v = M * v;
        out.push_back(v);
    }
    return out;
}

Vector solve_boundary(const Matrix& Z, const Vector& rhs) {
    const Matrix A = -Z;
    Eigen::PartialPivLU<Matrix> lu(A);
    const Vector pivots = lu.matrixLU().diagonal();
    if (!pivots.allFinite() || (pivots.array() == 0.0).any()) {
        throw Error(ErrorCategory::NumericalRank,
                    "passage boundary matrix is singular in floating point (mean passage times beyond "
                    "double range); use the perturbation method");
    }
    Vector x = lu.solve(rhs);
    x += lu.solve(rhs - A * x);
    if (!x.allFinite()) throw Error(ErrorCategory::NumericalRank, "passage boundary solve overflowed");
    return x;
}

Matrix gpow(const Matrix& G, int k) { return matrix_power<double>(G, k); }

struct System {
    Matrix Z;
    Vector rhs;
    std::vector<int> kept_levels;
    Matrix factor;
};

System build_system(const QbdBlocks& b, int ell, int j, const GMatrices& gm,
                    const std::vector<Vector>& mu) {
    const int n = b.n;
    const int C = b.C;
    const Matrix& G = gm.G;
    const Matrix& Gh = gm.Ghat;
    const Matrix I = Matrix::Identity(n, n);
    const Vector one = Vector::Ones(n);
    const Vector ej = unit(n, j);
    const BarredBlocks bar = barred_blocks(b, j);
    System sys;

    auto two_level_factor = [&](int gap) {
        Matrix f(2 * n, 2 * n);
        f << I, gpow(Gh, gap), gpow(G, gap), I;
        return f;
    };

    if (ell == 0) {
        sys.Z.resize(2 * n, 2 * n);
        sys.Z << bar.B0 + bar.A1 * G, (bar.B0 * Gh + bar.A1) * gpow(Gh, C - 1),
            (b.A_minus1 + b.C0 * G) * gpow(G, C - 1), b.A_minus1 * Gh + b.C0;
        sys.rhs.resize(2 * n);
        sys.rhs << one - ej + bar.B0 * mu[0] + bar.A1 * mu[1],
            one + b.A_minus1 * mu[C - 1] + b.C0 * mu[C];
        sys.kept_levels = {0, C};
        sys.factor = two_level_factor(C);
    } else if (ell == C) {
        sys.Z.resize(2 * n, 2 * n);
        sys.Z << b.B0 + b.A1 * G, (b.B0 * Gh + b.A1) * gpow(Gh, C - 1),
            (bar.A_minus1 + bar.C0 * G) * gpow(G, C - 1), bar.A_minus1 * Gh + bar.C0;
        sys.rhs.resize(2 * n);
        sys.rhs << one + b.B0 * mu[0] + b.A1 * mu[1],
            one - ej + bar.A_minus1 * mu[C - 1] + bar.C0 * mu[C];
        sys.kept_levels = {0, C};
        sys.factor = two_level_factor(C);
    } else if (ell == C - 1) {
        const Matrix O = Matrix::Zero(n, n);
        sys.Z.resize(3 * n, 3 * n);
        sys.Z << b.B0 + b.A1 * G, (b.B0 * Gh + b.A1) * gpow(Gh, C - 2), O,
            (bar.A_minus1 + bar.A0 * G) * gpow(G, C - 2), bar.A_minus1 * Gh + bar.A0, bar.A1,
            b.A_minus1 * gpow(G, C - 1), b.A_minus1, b.C0;
        sys.rhs.resize(3 * n);
        sys.rhs << one + b.B0 * mu[0] + b.A1 * mu[1],
            one - ej + bar.A_minus1 * mu[C - 2] + bar.A0 * mu[C - 1] + bar.A1 * mu[C],
            one + b.A_minus1 * mu[C - 1] + b.C0 * mu[C];
        sys.kept_levels = {0, C - 1, C};
        sys.factor = Matrix::Identity(3 * n, 3 * n);
        sys.factor.block(0, n, n, n) = gpow(Gh, C - 1);
        sys.factor.block(n, 0, n, n) = gpow(G, C - 1);
    } else {
        const Matrix O = Matrix::Zero(n, n);
        const int up = C - ell - 1;
        sys.Z.resize(4 * n, 4 * n);
        sys.Z << b.B0 + b.A1 * G, (b.B0 * Gh + b.A1) * gpow(Gh, ell - 1), O, O,
            (bar.A_minus1 + bar.A0 * G) * gpow(G, ell - 1), bar.A_minus1 * Gh + bar.A0, bar.A1,
            bar.A1 * gpow(Gh, up),
            b.A_minus1 * gpow(G, ell), b.A_minus1, b.A0 + b.A1 * G, (b.A0 * Gh + b.A1) * gpow(Gh, up - 1),
            O, O, (b.C0 * G + b.A_minus1) * gpow(G, up - 1), b.C0 + b.A_minus1 * Gh;
        sys.rhs.resize(4 * n);
        sys.rhs << one + b.B0 * mu[0] + b.A1 * mu[1],
            one - ej + bar.A_minus1 * mu[ell - 1] + bar.A0 * mu[ell] + bar.A1 * mu[ell + 1],
            one + b.A_minus1 * mu[ell] + b.A0 * mu[ell + 1] + b.A1 * mu[ell + 2],
            one + b.A_minus1 * mu[C - 1] + b.C0 * mu[C];
        sys.kept_levels = {0, ell, ell + 1, C};
        sys.factor = Matrix::Identity(4 * n, 4 * n);
        sys.factor.block(0, n, n, n) = gpow(Gh, ell);
        sys.factor.block(n, 0, n, n) = gpow(G, ell);
        sys.factor.block(2 * n, 3 * n, n, n) = gpow(Gh, up);
        sys.factor.block(3 * n, 2 * n, n, n) = gpow(G, up);
    }
    return sys;
}

void require_zero_s(const GMatrices& gm) {
    if (gm.s != 0.0) throw Error(ErrorCategory::Precondition, "passage times need the s = 0 matrices");
}

} // namespace

BarredBlocks barred_blocks(const QbdBlocks& b, int phase) {
    if (phase < 0 || phase >= b.n) throw Error(ErrorCategory::Parameter, "phase index out of range");
    BarredBlocks out{phase, b.A_minus1, b.A0, b.A1, b.B0, b.C0};
    const RowVector minus_e = -unit(b.n, phase).transpose();
    out.A_minus1.row(phase).setZero();
    out.A1.row(phase).setZero();
    out.B0.row(phase) = minus_e;
    out.A0.row(phase) = minus_e;
    out.C0.row(phase) = minus_e;
    return out;
}

std::vector<Vector> mu_all(const QbdBlocks& b, const GMatrices& gm, int C) {
    require_zero_s(gm);
    if (C < 1) throw Error(ErrorCategory::Parameter, "capacity must be >= 1");
    const Vector h = gm.H0 * Vector::Ones(b.n);
    std::vector<Vector> out(static_cast<std::size_t>(C + 1));
    Vector forward = Vector::Zero(b.n);
    out[0] = forward;
    for (int k = 1; k <= C; ++k) {
        forward = h + gm.G * forward;
        out[k] = forward;
    }
    Vector backward = Vector::Zero(b.n);
    for (int k = C - 1; k >= 0; --k) {
        backward = gm.Ghat * (h + backward);
        out[k] += backward;
    }
    return out;
}

Vector mu_k(const QbdBlocks& b, const GMatrices& gm, int C, int k) {
    if (k < 0 || k > C) throw Error(ErrorCategory::Parameter, "level outside 0..C");
    return mu_all(b, gm, C)[static_cast<std::size_t>(k)];
}

Vector mu_unbounded(const QbdBlocks& b, const GMatrices& gm, int k) {
    require_zero_s(gm);
    if (k < 0) throw Error(ErrorCategory::Parameter, "level must be >= 0");
    const int n = b.n;
    const Matrix I = Matrix::Identity(n, n);
    const Vector h = gm.H0 * Vector::Ones(n);
    Eigen::PartialPivLU<Matrix> lu(I - gm.Ghat);
    if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon())) {
        throw Error(ErrorCategory::Precondition, "I - Ghat is singular: the process is not positive recurrent");
    }
    Vector out = lu.solve(h) - h;
    Vector forward = Vector::Zero(n);
    for (int i = 1; i <= k; ++i) forward = h + gm.G * forward;
    return out + forward;
}

PassageColumn passage_column(const QbdBlocks& b, int ell, int j, const GMatrices& gm) {
    require_target(b, ell, j);
    const int n = b.n;
    const int C = b.C;
    const std::vector<Vector> mu = mu_all(b, gm, C);
    const System sys = build_system(b, ell, j, gm, mu);
    const Vector x = solve_boundary(sys.Z, sys.rhs);

    PassageColumn out;
    out.level = ell;
    out.phase = j;
    out.m = mu;
    auto add = [&](int from, int to, const Vector& v, const Vector& w, int w_top) {
        // levels from..to get G^{k-from} v + Ghat^{w_top-k} w
        const int count = to - from + 1;
        const auto gv = orbit(gm.G, v, count);
        const auto hw = orbit(gm.Ghat, w, w_top - from + 1);
        for (int k = from; k <= to; ++k) out.m[k] += gv[k - from] + hw[w_top - k];
    };
    if (ell == 0 || ell == C) {
        add(0, C, x.head(n), x.segment(n, n), C);
    } else if (ell == C - 1) {
        add(0, C - 1, x.head(n), x.segment(n, n), C - 1);
        out.m[C] += x.segment(2 * n, n);
    } else {
        add(0, ell, x.head(n), x.segment(n, n), ell);
        add(ell + 1, C, x.segment(2 * n, n), x.segment(3 * n, n), C);
    }
    out.m[ell](j) = 0.0;
    return out;
}

std::vector<PassageColumn> passage_columns(const QbdBlocks& b, int ell, const GMatrices& gm) {
    std::vector<PassageColumn> out;
    out.reserve(static_cast<std::size_t>(b.n));
    for (int j = 0; j < b.n; ++j) out.push_back(passage_column(b, ell, j, gm));
    return out;
}

Matrix passage_z_matrix(const QbdBlocks& b, int ell, int j, const GMatrices& gm) {
    require_target(b, ell, j);
    return build_system(b, ell, j, gm, mu_all(b, gm, b.C)).Z;
}

double passage_z_factorization_residual(const QbdBlocks& b, int ell, int j, const GMatrices& gm) {
    require_target(b, ell, j);
    const System sys = build_system(b, ell, j, gm, mu_all(b, gm, b.C));
    Matrix Q = assemble_generator(b);
    const Eigen::Index target = static_cast<Eigen::Index>(ell) * b.n + j;
    Q.row(target).setZero();
    Q(target, target) = -1.0;
    const Matrix censored = censor(Q, level_indices(b.n, sys.kept_levels));
    return relative_frobenius(censored * sys.factor, sys.Z);
}

PassageColumn passage_column_unbounded(const QbdBlocks& b, int ell, int j, const GMatrices& gm,
                                       int max_level) {
    if (classify_drift(b).tag != DriftTag::PositiveRecurrent) {
        throw Error(ErrorCategory::Precondition,
                    "unbounded passage times need a positive recurrent process");
    }
    require_zero_s(gm);
    const int n = b.n;
    if (ell < 0 || j < 0 || j >= n || max_level < 0) {
        throw Error(ErrorCategory::Parameter, "invalid target or level range");
    }
    const int top = std::max(max_level, ell + 2);
    std::vector<Vector> mu;
    mu.reserve(static_cast<std::size_t>(top + 1));
    {
        Vector base = mu_unbounded(b, gm, 0);
        const Vector h = gm.H0 * Vector::Ones(n);
        Vector forward = Vector::Zero(n);
        mu.push_back(base);
        for (int k = 1; k <= top; ++k) {
            forward = h + gm.G * forward;
            mu.push_back(base + forward);
        }
    }
    const Matrix& G = gm.G;
    const Matrix& Gh = gm.Ghat;
    const Vector one = Vector::Ones(n);
    const Vector ej = unit(n, j);
    const BarredBlocks bar = barred_blocks(b, j);

    PassageColumn out;
    out.level = ell;
    out.phase = j;
    out.m.assign(mu.begin(), mu.begin() + max_level + 1);
    if (ell == 0) {
        const Matrix M = bar.B0 + bar.A1 * G;
        const Vector rhs = one - ej + bar.B0 * mu[0] + bar.A1 * mu[1];
        const Vector v = solve_boundary(M, rhs);
        const auto gv = orbit(G, v, max_level + 1);
        for (int k = 0; k <= max_level; ++k) out.m[k] += gv[k];
    } else {
        const Matrix O = Matrix::Zero(n, n);
        Matrix W(3 * n, 3 * n);
        W << b.B0 + b.A1 * G, (b.B0 * Gh + b.A1) * gpow(Gh, ell - 1), O,
            (bar.A_minus1 + bar.A0 * G) * gpow(G, ell - 1), bar.A_minus1 * Gh + bar.A0, bar.A1,
            b.A_minus1 * gpow(G, ell), b.A_minus1, b.A0 + b.A1 * G;
        Vector rhs(3 * n);
        rhs << one + b.B0 * mu[0] + b.A1 * mu[1],
            one - ej + bar.A_minus1 * mu[ell - 1] + bar.A0 * mu[ell] + bar.A1 * mu[ell + 1],
            one + b.A_minus1 * mu[ell] + b.A0 * mu[ell + 1] + b.A1 * mu[ell + 2];
        const Vector x = solve_boundary(W, rhs);
        const auto gv = orbit(G, x.head(n), ell + 1);
        const auto hw = orbit(Gh, x.segment(n, n), ell + 1);
        for (int k = 0; k <= std::min(ell, max_level); ++k) out.m[k] += gv[k] + hw[ell - k];
        if (max_level > ell) {
            const auto up = orbit(G, x.segment(2 * n, n), max_level - ell);
            for (int k = ell + 1; k <= max_level; ++k) out.m[k] += up[k - ell - 1];
        }
    }
    if (ell <= max_level) out.m[ell](j) = 0.0;
    return out;
}

Matrix passage_block(const std::vector<PassageColumn>& columns, int k) {
    if (columns.empty()) throw Error(ErrorCategory::Structural, "no passage columns given");
    const auto n = static_cast<Eigen::Index>(columns.size());
    Matrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& col = columns[static_cast<std::size_t>(j)];
        if (col.phase != j) throw Error(ErrorCategory::Structural, "passage columns out of phase order");
        out.col(j) = col.m.at(static_cast<std::size_t>(k));
    }
    return out;
}

Matrix passage_matrix(const QbdBlocks& b, const GMatrices& gm) {
    const int n = b.n;
    const int C = b.C;
    Matrix out(b.size(), b.size());
    for (int ell = 0; ell <= C; ++ell) {
        const auto cols = passage_columns(b, ell, gm);
        for (int k = 0; k <= C; ++k) out.block(k * n, ell * n, n, n) = passage_block(cols, k);
    }
    return out;
}

std::string_view to_string(DeviationMethod method) noexcept {
    switch (method) {
    case DeviationMethod::DifferenceEquation: return "diffeq";
    case DeviationMethod::Perturbation: return "perturb";
    case DeviationMethod::Oracle: return "oracle";
    case DeviationMethod::LaplaceInversion: return "inversion";
    }
    return "unknown";
}

Matrix deviation_block_asymptotic(const StationaryDistribution& pi,
                                  const std::vector<PassageColumn>& columns, int k) {
    if (columns.empty()) throw Error(ErrorCategory::Structural, "no passage columns given");
    const auto n = static_cast<Eigen::Index>(columns.size());
    const int ell = columns.front().level;
    const auto levels = static_cast<int>(pi.pi.size());
    RowVector weighted = RowVector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& col = columns[static_cast<std::size_t>(j)];
        if (col.level != ell || static_cast<int>(col.m.size()) != levels) {
            throw Error(ErrorCategory::Structural, "passage columns do not match the stationary vector");
        }
        double acc = 0.0;
        for (int x = 0; x < levels; ++x) acc += pi.pi[x].dot(col.m[x]);
        weighted(j) = acc;
    }
    const Matrix Mk = passage_block(columns, k);
    const Matrix diff = Vector::Ones(n) * weighted - Mk;
    return diff * pi.pi.at(static_cast<std::size_t>(ell)).asDiagonal();
}

RowVector stationary_from_passage(const QbdBlocks& b, const std::vector<PassageColumn>& columns) {
    const int n = b.n;
    if (static_cast<int>(columns.size()) != n) {
        throw Error(ErrorCategory::Structural, "need the n passage columns of one level");
    }
    const int ell = columns.front().level;
    const Matrix& local = ell == 0 ? b.B0 : (ell == b.C ? b.C0 : b.A0);
    RowVector out(n);
    for (int j = 0; j < n; ++j) {
        const auto& m = columns[static_cast<std::size_t>(j)].m;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i != j) sum += local(j, i) * m[ell](i);
        }
        if (ell > 0) sum += b.A_minus1.row(j).dot(m[ell - 1]);
        if (ell < b.C) sum += b.A1.row(j).dot(m[ell + 1]);
        out(j) = 1.0 / (1.0 + sum);
    }
    return out;
}

DeviationResult deviation_block_column(const QbdBlocks& b, int ell, const GMatrices& gm,
                                       const StationaryDistribution& pi_in) {
    const int n = b.n;
    const int C = b.C;
    if (ell < 0 || ell > C) throw Error(ErrorCategory::Parameter, "level outside 0..C");
    DeviationResult out;
    out.method = DeviationMethod::DifferenceEquation;
    out.column_level = ell;
    const auto cols = passage_columns(b, ell, gm);
    // Entries of pi_ell far below 1 carry only absolute accuracy; recover
    // relative accuracy from the passage times.
    StationaryDistribution pi = pi_in;
    pi.pi.at(static_cast<std::size_t>(ell)) = stationary_from_passage(b, cols);
    const RowVector& p = pi.pi[static_cast<std::size_t>(ell)];
    for (Eigen::Index i = 0; i < n; ++i) {
        if (p(i) < 1e-300) {
            out.warnings.push_back("stationary mass of state (" + std::to_string(ell) + ", " +
                                   std::to_string(i + 1) + ") underflows (" + std::to_string(p(i)) + ")");
        }
    }
    out.matrix.resize(b.size(), n);
    for (int k = 0; k <= C; ++k) out.matrix.block(k * n, 0, n, n) = deviation_block_asymptotic(pi, cols, k);
    return out;
}

DeviationResult deviation_block_column(const QbdBlocks& b, int ell, const SolverConfig& config) {
    const GMatrices gm = compute_gmatrices(b, 0.0, config);
    return deviation_block_column(b, ell, gm, stationary_rmatrix(b, gm));
}

DeviationResult deviation_difference(const QbdBlocks& b, const SolverConfig& config) {
    const GMatrices gm = compute_gmatrices(b, 0.0, config);
    const StationaryDistribution pi = stationary_rmatrix(b, gm);
    const int n = b.n;
    DeviationResult out;
    out.method = DeviationMethod::DifferenceEquation;
    out.matrix.resize(b.size(), b.size());
    for (int ell = 0; ell <= b.C; ++ell) {
        DeviationResult col = deviation_block_column(b, ell, gm, pi);
        out.matrix.middleCols(ell * n, n) = col.matrix;
        for (auto& w : col.warnings) out.warnings.push_back(std::move(w));
    }
    return out;
}

} // namespace qbdr
