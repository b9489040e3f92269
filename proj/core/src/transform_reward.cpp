#include "qbdr/transform_reward.hpp"

#include <cmath>
#include <limits>

#include "qbdr/linalg.hpp"

namespace qbdr {

namespace {

template <class Scalar>
MatrixOf<Scalar> as(const Matrix& m) {
    return m.template cast<Scalar>();
}

template <class Scalar>
MatrixOf<Scalar> shifted(const Matrix& m, Scalar s) {
    MatrixOf<Scalar> out = as<Scalar>(m);
    out.diagonal().array() -= s;
    return out;
}

template <class Scalar>
void require_positive(Scalar s) {
    if (!(std::real(s) > 0.0)) {
        throw Error(ErrorCategory::Precondition, "transform variable must have Re(s) > 0");
    }
}

void require_level(int k, int C, const char* what) {
    if (k < 0 || k > C) {
        throw Error(ErrorCategory::Parameter,
                    std::string(what) + " " + std::to_string(k) + " outside 0.." + std::to_string(C));
    }
}

void require_rewards(const RewardSpec& r, const QbdBlocks& b) {
    if (static_cast<int>(r.g.size()) != b.C + 1) {
        throw Error(ErrorCategory::Structural, "reward spec must have C+1 level vectors");
    }
    for (const auto& g : r.g) {
        if (g.size() != b.n) throw Error(ErrorCategory::Structural, "reward vector has wrong length");
    }
}

template <class Scalar>
MatrixOf<Scalar> ones_times(const RowVector& pi, Eigen::Index n) {
    return (Vector::Ones(n) * pi).template cast<Scalar>();
}

template <class Scalar>
BasicTransformContext<Scalar> make_context_impl(const QbdBlocks& b, Scalar s,
                                                const SolverConfig& config) {
    require_positive(s);
    using Mat = MatrixOf<Scalar>;
    BasicTransformContext<Scalar> ctx;
    ctx.s = s;
    ctx.blocks = b;
    ctx.gmat = compute_gmatrices(b, s, config);

    const int C = b.C;
    ctx.powers_G.resize(static_cast<std::size_t>(C + 1));
    ctx.powers_Ghat.resize(static_cast<std::size_t>(C + 1));
    ctx.powers_G[0] = Mat::Identity(b.n, b.n);
    ctx.powers_Ghat[0] = Mat::Identity(b.n, b.n);
    for (int k = 1; k <= C; ++k) {
        ctx.powers_G[k] = ctx.powers_G[k - 1] * ctx.gmat.G;
        ctx.powers_Ghat[k] = ctx.powers_Ghat[k - 1] * ctx.gmat.Ghat;
    }

    const int n = b.n;
    const Mat Bs = shifted(b.B0, s);
    const Mat Cs = shifted(b.C0, s);
    const Mat A1 = as<Scalar>(b.A1);
    const Mat Am1 = as<Scalar>(b.A_minus1);
    const Mat& G = ctx.gmat.G;
    const Mat& Gh = ctx.gmat.Ghat;
    ctx.Z.resize(2 * n, 2 * n);
    ctx.Z.topLeftCorner(n, n) = Bs + A1 * G;
    ctx.Z.topRightCorner(n, n) = (Bs * Gh + A1) * ctx.powers_Ghat[C - 1];
    ctx.Z.bottomLeftCorner(n, n) = (Am1 + Cs * G) * ctx.powers_G[C - 1];
    ctx.Z.bottomRightCorner(n, n) = Am1 * Gh + Cs;
    ctx.Z_lu.compute(ctx.Z);
    if (!(ctx.Z_lu.rcond() > std::numeric_limits<double>::epsilon())) {
        throw Error(ErrorCategory::Singular, "Z(s, C) is numerically singular");
    }
    return ctx;
}

// (-s Z)^{-1} rhs
template <class Scalar>
MatrixOf<Scalar> solve_scaled(const BasicTransformContext<Scalar>& ctx, const MatrixOf<Scalar>& rhs) {
    return ctx.Z_lu.solve(rhs) / (-ctx.s);
}

template <class Scalar>
struct DeviationColumnSolve {
    MatrixOf<Scalar> V;
    MatrixOf<Scalar> W;
};

template <class Scalar>
DeviationColumnSolve<Scalar> deviation_constants(const BasicTransformContext<Scalar>& ctx, int ell) {
    using Mat = MatrixOf<Scalar>;
    const QbdBlocks& b = ctx.blocks;
    const int n = b.n;
    const int C = b.C;
    const Scalar s = ctx.s;
    const Mat Bs = shifted(b.B0, s);
    const Mat A1 = as<Scalar>(b.A1);
    const Mat Am1 = as<Scalar>(b.A_minus1);
    Mat rhs(2 * n, n);
    if (ell == 0) {
        rhs.topRows(n) = Mat::Identity(n, n);
        rhs.bottomRows(n).setZero();
    } else if (ell < C) {
        rhs.topRows(n) = Bs * ctx.powers_Ghat[ell] + A1 * ctx.powers_Ghat[ell - 1];
        rhs.bottomRows(n) = Am1 * ctx.powers_G[C - 1 - ell] + shifted(b.C0, s) * ctx.powers_G[C - ell];
    } else {
        rhs.topRows(n) = Bs * ctx.powers_Ghat[C] + A1 * ctx.powers_Ghat[C - 1];
        rhs.bottomRows(n) = as<Scalar>(b.C0 - b.A0) - A1 * ctx.gmat.G;
    }
    const Mat X = solve_scaled(ctx, rhs);
    return {X.topRows(n), X.bottomRows(n)};
}

template <class Scalar>
MatrixOf<Scalar> deviation_block_from(const BasicTransformContext<Scalar>& ctx,
                                      const DeviationColumnSolve<Scalar>& vw,
                                      const RowVector& pi_ell, int k, int ell) {
    using Mat = MatrixOf<Scalar>;
    const int n = ctx.blocks.n;
    const int C = ctx.blocks.C;
    const Scalar s = ctx.s;
    Mat out = ctx.powers_G[k] * vw.V + ctx.powers_Ghat[C - k] * vw.W;
    if (ell == 0) {
        // no H0 factor for the level-0 column
    } else if (ell < C) {
        out += (ell <= k ? ctx.powers_G[k - ell] : ctx.powers_Ghat[ell - k]) / s;
        out = out * ctx.gmat.H0;
    } else {
        out += ctx.powers_Ghat[C - k] / s;
        out = out * ctx.gmat.H0;
    }
    return out - ones_times<Scalar>(pi_ell, n) / (s * s);
}

template <class Scalar>
VectorOf<Scalar> geometric_tail_sum(const MatrixOf<Scalar>& Gh, VectorOf<Scalar> term, double ratio,
                                    const RewardTail& r) {
    VectorOf<Scalar> sum = VectorOf<Scalar>::Zero(term.size());
    for (int m = 0; m < r.max_terms; ++m) {
        sum += term;
        const double size = max_abs(term);
        if (!std::isfinite(size)) break;
        if (size <= r.tolerance * std::max(1.0, max_abs(sum))) return sum;
        term = (Gh * term) * ratio;
    }
    throw Error(ErrorCategory::TailConvergence, "reward tail series did not converge");
}

template <class Scalar>
VectorOf<Scalar> tail_reward(const RewardTail& r, int level, int n) {
    const auto head = static_cast<int>(r.head.size());
    if (level < head) return r.head[static_cast<std::size_t>(level)].template cast<Scalar>();
    if (r.tail.size() == 0) return VectorOf<Scalar>::Zero(n);
    return (r.tail * std::pow(r.ratio, level - head)).template cast<Scalar>();
}

void require_tail(const RewardTail& r, int n) {
    for (const auto& g : r.head) {
        if (g.size() != n) throw Error(ErrorCategory::Structural, "reward vector has wrong length");
    }
    if (r.tail.size() != 0 && r.tail.size() != n) {
        throw Error(ErrorCategory::Structural, "reward tail vector has wrong length");
    }
    if (!(r.tolerance > 0.0) || r.max_terms < 1) {
        throw Error(ErrorCategory::Parameter, "tail tolerance must be > 0 and max_terms >= 1");
    }
}

template <class Scalar>
MatrixOf<Scalar> boundary_inverse(const BasicTransformContext<Scalar>& ctx) {
    const QbdBlocks& b = ctx.blocks;
    const MatrixOf<Scalar> M = shifted(b.B0, ctx.s) + as<Scalar>(b.A1) * ctx.gmat.G;
    Eigen::PartialPivLU<MatrixOf<Scalar>> lu(M);
    if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) {
        throw Error(ErrorCategory::Singular, "(B0 - sI) + A1 G(s) is numerically singular");
    }
    return lu.inverse();
}

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCategory::Precondition, "time must be finite and >= 0");
    }
}

CVector flatten(const CMatrix& m) {
    return Eigen::Map<const CVector>(m.data(), m.size());
}

} // namespace

TransformContext make_transform_context(const QbdBlocks& b, double s, const SolverConfig& config) {
    return make_context_impl(b, s, config);
}

ComplexTransformContext make_transform_context(const QbdBlocks& b, Complex s,
                                               const SolverConfig& config) {
    return make_context_impl(b, s, config);
}

template <class Scalar>
VectorOf<Scalar> nu_k(const BasicTransformContext<Scalar>& ctx, const RewardSpec& rewards, int k) {
    const QbdBlocks& b = ctx.blocks;
    require_rewards(rewards, b);
    require_level(k, b.C, "level");
    VectorOf<Scalar> out = VectorOf<Scalar>::Zero(b.n);
    for (int j = 0; j <= k - 1; ++j) {
        out += ctx.powers_G[j] * (ctx.gmat.H0 * rewards.g[k - j].template cast<Scalar>());
    }
    for (int j = 1; j <= b.C - k; ++j) {
        out += ctx.powers_Ghat[j] * (ctx.gmat.H0 * rewards.g[k + j].template cast<Scalar>());
    }
    return out / ctx.s;
}

template <class Scalar>
std::vector<VectorOf<Scalar>> nu_all(const BasicTransformContext<Scalar>& ctx,
                                     const RewardSpec& rewards) {
    using Vec = VectorOf<Scalar>;
    const QbdBlocks& b = ctx.blocks;
    require_rewards(rewards, b);
    const int C = b.C;
    std::vector<Vec> h(static_cast<std::size_t>(C + 1));
    for (int k = 0; k <= C; ++k) h[k] = ctx.gmat.H0 * rewards.g[k].template cast<Scalar>() / ctx.s;

    std::vector<Vec> out(static_cast<std::size_t>(C + 1));
    Vec forward = Vec::Zero(b.n);
    out[0] = forward;
    for (int k = 1; k <= C; ++k) {
        forward = h[k] + ctx.gmat.G * forward;
        out[k] = forward;
    }
    Vec backward = Vec::Zero(b.n);
    for (int k = C - 1; k >= 0; --k) {
        backward = ctx.gmat.Ghat * (h[k + 1] + backward);
        out[k] += backward;
    }
    return out;
}

Matrix censored_transient_generator(const QbdBlocks& b, double s) {
    Matrix Q = assemble_generator(b);
    Q.diagonal().array() -= s;
    return censor(Q, level_indices(b.n, {0, b.C}));
}

double z_factorization_residual(const TransformContext& ctx) {
    const int n = ctx.blocks.n;
    const int C = ctx.blocks.C;
    Matrix factor(2 * n, 2 * n);
    factor.topLeftCorner(n, n).setIdentity();
    factor.topRightCorner(n, n) = ctx.powers_Ghat[C];
    factor.bottomLeftCorner(n, n) = ctx.powers_G[C];
    factor.bottomRightCorner(n, n).setIdentity();
    return relative_frobenius(censored_transient_generator(ctx.blocks, ctx.s) * factor, ctx.Z);
}

template <class Scalar>
BoundaryVectors<Scalar> reward_boundary_vectors(const BasicTransformContext<Scalar>& ctx,
                                                const RewardSpec& rewards,
                                                const std::vector<VectorOf<Scalar>>& nu) {
    using Vec = VectorOf<Scalar>;
    const QbdBlocks& b = ctx.blocks;
    require_rewards(rewards, b);
    const int n = b.n;
    const int C = b.C;
    if (static_cast<int>(nu.size()) != C + 1) {
        throw Error(ErrorCategory::Structural, "nu must have C+1 entries");
    }
    Vec rhs(2 * n);
    rhs.head(n) = rewards.g[0].template cast<Scalar>() / ctx.s + shifted(b.B0, ctx.s) * nu[0] +
                  as<Scalar>(b.A1) * nu[1];
    rhs.tail(n) = rewards.g[C].template cast<Scalar>() / ctx.s + as<Scalar>(b.A_minus1) * nu[C - 1] +
                  shifted(b.C0, ctx.s) * nu[C];
    const Vec x = -ctx.Z_lu.solve(rhs);
    return {x.head(n), x.tail(n)};
}

template <class Scalar>
std::vector<VectorOf<Scalar>> reward_transform(const BasicTransformContext<Scalar>& ctx,
                                               const RewardSpec& rewards) {
    const int C = ctx.blocks.C;
    std::vector<VectorOf<Scalar>> out = nu_all(ctx, rewards);
    const BoundaryVectors<Scalar> vw = reward_boundary_vectors(ctx, rewards, out);
    for (int k = 0; k <= C; ++k) out[k] += ctx.powers_G[k] * vw.v + ctx.powers_Ghat[C - k] * vw.w;
    return out;
}

template <class Scalar>
VectorOf<Scalar> nu_unbounded(const BasicTransformContext<Scalar>& ctx, const RewardTail& rewards,
                              int k) {
    using Vec = VectorOf<Scalar>;
    const int n = ctx.blocks.n;
    require_tail(rewards, n);
    if (k < 0) throw Error(ErrorCategory::Parameter, "level must be >= 0");
    const auto& G = ctx.gmat.G;
    const auto& Gh = ctx.gmat.Ghat;
    const auto& H0 = ctx.gmat.H0;

    // sum_{j=0}^{k-1} G^j H0 g_{k-j}, Horner style
    Vec lower = Vec::Zero(n);
    for (int level = 1; level <= k; ++level) {
        lower = H0 * tail_reward<Scalar>(rewards, level, n) + G * lower;
    }

    // sum_{j>=1} Ghat^j H0 g_{k+j}: explicit head, then the geometric tail.
    const int head = static_cast<int>(rewards.head.size());
    Vec upper = Vec::Zero(n);
    MatrixOf<Scalar> power = Gh;
    int j = 1;
    for (; k + j < head; ++j) {
        upper += power * (H0 * tail_reward<Scalar>(rewards, k + j, n));
        power = power * Gh;
    }
    if (rewards.tail.size() != 0) {
        const Vec first = power * (H0 * tail_reward<Scalar>(rewards, k + j, n));
        upper += geometric_tail_sum<Scalar>(Gh, first, rewards.ratio, rewards);
    }
    return (lower + upper) / ctx.s;
}

template <class Scalar>
VectorOf<Scalar> reward_transform_unbounded(const BasicTransformContext<Scalar>& ctx,
                                            const RewardTail& rewards, int k) {
    const QbdBlocks& b = ctx.blocks;
    const int n = b.n;
    const VectorOf<Scalar> nu0 = nu_unbounded(ctx, rewards, 0);
    const VectorOf<Scalar> nu1 = nu_unbounded(ctx, rewards, 1);
    const VectorOf<Scalar> rhs = tail_reward<Scalar>(rewards, 0, n) / ctx.s +
                                 shifted(b.B0, ctx.s) * nu0 + as<Scalar>(b.A1) * nu1;
    const VectorOf<Scalar> v = -(boundary_inverse(ctx) * rhs);
    const VectorOf<Scalar> nuk = k == 0 ? nu0 : (k == 1 ? nu1 : nu_unbounded(ctx, rewards, k));
    return matrix_power<Scalar>(ctx.gmat.G, k) * v + nuk;
}

template <class Scalar>
MatrixOf<Scalar> deviation_transform_block(const BasicTransformContext<Scalar>& ctx,
                                           const StationaryDistribution& pi, int k, int ell) {
    require_level(k, ctx.blocks.C, "level");
    require_level(ell, ctx.blocks.C, "level");
    return deviation_block_from(ctx, deviation_constants(ctx, ell), pi.pi.at(static_cast<std::size_t>(ell)),
                                k, ell);
}

template <class Scalar>
std::vector<MatrixOf<Scalar>> deviation_transform_column(const BasicTransformContext<Scalar>& ctx,
                                                         const StationaryDistribution& pi,
                                                         int ell) {
    const int C = ctx.blocks.C;
    require_level(ell, C, "level");
    const auto vw = deviation_constants(ctx, ell);
    const RowVector& pi_ell = pi.pi.at(static_cast<std::size_t>(ell));
    std::vector<MatrixOf<Scalar>> out;
    out.reserve(static_cast<std::size_t>(C + 1));
    for (int k = 0; k <= C; ++k) out.push_back(deviation_block_from(ctx, vw, pi_ell, k, ell));
    return out;
}

template <class Scalar>
MatrixOf<Scalar> deviation_transform_full(const BasicTransformContext<Scalar>& ctx,
                                          const StationaryDistribution& pi) {
    const int n = ctx.blocks.n;
    const int C = ctx.blocks.C;
    MatrixOf<Scalar> out(n * (C + 1), n * (C + 1));
    for (int ell = 0; ell <= C; ++ell) {
        const auto column = deviation_transform_column(ctx, pi, ell);
        for (int k = 0; k <= C; ++k) out.block(k * n, ell * n, n, n) = column[k];
    }
    return out;
}

template <class Scalar>
MatrixOf<Scalar> deviation_transform_unbounded(const BasicTransformContext<Scalar>& ctx,
                                               const RowVector& pi_ell, int k, int ell) {
    using Mat = MatrixOf<Scalar>;
    const QbdBlocks& b = ctx.blocks;
    const int n = b.n;
    if (k < 0 || ell < 0) throw Error(ErrorCategory::Parameter, "levels must be >= 0");
    if (pi_ell.size() != n) throw Error(ErrorCategory::Structural, "pi block has wrong length");
    const Scalar s = ctx.s;
    const Mat inner = boundary_inverse(ctx) / (-s);
    const Mat Gk = matrix_power<Scalar>(ctx.gmat.G, k);
    if (ell == 0) return Gk * inner - ones_times<Scalar>(pi_ell, n) / (s * s);

    const Mat& Gh = ctx.gmat.Ghat;
    const Mat V = inner * (shifted(b.B0, s) * Gh + as<Scalar>(b.A1)) * matrix_power<Scalar>(Gh, ell - 1);
    Mat out = Gk * V;
    out += (ell <= k ? matrix_power<Scalar>(ctx.gmat.G, k - ell) : matrix_power<Scalar>(Gh, ell - k)) / s;
    return out * ctx.gmat.H0 - ones_times<Scalar>(pi_ell, n) / (s * s);
}

std::vector<Vector> reward_time(const QbdBlocks& b, const RewardSpec& rewards, double t,
                                const TimeDomainConfig& config) {
    require_time(t);
    require_rewards(rewards, b);
    const int n = b.n;
    const int C = b.C;
    std::vector<Vector> out(static_cast<std::size_t>(C + 1), Vector::Zero(n));
    if (t == 0.0) return out;
    auto transform = [&](Complex s) {
        const auto ctx = make_transform_context(b, s, config.solver);
        const auto r = reward_transform(ctx, rewards);
        CVector stacked(n * (C + 1));
        for (int k = 0; k <= C; ++k) stacked.segment(k * n, n) = r[k];
        return stacked;
    };
    const Vector stacked = invert_laplace(transform, t, config.inversion);
    for (int k = 0; k <= C; ++k) out[k] = stacked.segment(k * n, n);
    return out;
}

Vector reward_time(const QbdBlocks& b, const RewardSpec& rewards, double t, int level,
                   const TimeDomainConfig& config) {
    require_level(level, b.C, "level");
    return reward_time(b, rewards, t, config)[static_cast<std::size_t>(level)];
}

Matrix transient_deviation(const QbdBlocks& b, const StationaryDistribution& pi, double t,
                           const TimeDomainConfig& config) {
    require_time(t);
    const Eigen::Index N = b.size();
    if (t == 0.0) return Matrix::Zero(N, N);
    auto transform = [&](Complex s) {
        return flatten(deviation_transform_full(make_transform_context(b, s, config.solver), pi));
    };
    const Vector flat = invert_laplace(transform, t, config.inversion);
    return Eigen::Map<const Matrix>(flat.data(), N, N);
}

Matrix transient_deviation_block(const QbdBlocks& b, const StationaryDistribution& pi, double t,
                                 int k, int ell, const TimeDomainConfig& config) {
    require_time(t);
    require_level(k, b.C, "level");
    require_level(ell, b.C, "level");
    const int n = b.n;
    if (t == 0.0) return Matrix::Zero(n, n);
    auto transform = [&](Complex s) {
        return flatten(deviation_transform_block(make_transform_context(b, s, config.solver), pi, k, ell));
    };
    const Vector flat = invert_laplace(transform, t, config.inversion);
    return Eigen::Map<const Matrix>(flat.data(), n, n);
}

Matrix occupation_matrix(const QbdBlocks& b, const StationaryDistribution& pi, double t,
                         const TimeDomainConfig& config) {
    const Eigen::Index N = b.size();
    return Vector::Ones(N) * pi.stacked() * t + transient_deviation(b, pi, t, config);
}

#define QBDR_INSTANTIATE(S)                                                                       \
    template VectorOf<S> nu_k(const BasicTransformContext<S>&, const RewardSpec&, int);          \
    template std::vector<VectorOf<S>> nu_all(const BasicTransformContext<S>&, const RewardSpec&); \
    template BoundaryVectors<S> reward_boundary_vectors(const BasicTransformContext<S>&,          \
                                                        const RewardSpec&,                        \
                                                        const std::vector<VectorOf<S>>&);         \
    template std::vector<VectorOf<S>> reward_transform(const BasicTransformContext<S>&,           \
                                                       const RewardSpec&);                        \
    template VectorOf<S> nu_unbounded(const BasicTransformContext<S>&, const RewardTail&, int);   \
    template VectorOf<S> reward_transform_unbounded(const BasicTransformContext<S>&,              \
                                                    const RewardTail&, int);                      \
    template MatrixOf<S> deviation_transform_block(const BasicTransformContext<S>&,               \
                                                   const StationaryDistribution&, int, int);      \
    template std::vector<MatrixOf<S>> deviation_transform_column(                                 \
        const BasicTransformContext<S>&, const StationaryDistribution&, int);                     \
    template MatrixOf<S> deviation_transform_full(const BasicTransformContext<S>&,                \
                                                  const StationaryDistribution&);                 \
    template MatrixOf<S> deviation_transform_unbounded(const BasicTransformContext<S>&,           \
                                                       const RowVector&, int, int);

QBDR_INSTANTIATE(double)
QBDR_INSTANTIATE(Complex)

#undef QBDR_INSTANTIATE

} // namespace qbdr
