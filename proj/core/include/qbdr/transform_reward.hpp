#pragma once

#include <vector>

#include "qbdr/laplace_inversion.hpp"
#include "qbdr/matrix_equations.hpp"
#include "qbdr/stationary.hpp"

namespace qbdr {

// Everything at a fixed transform variable s (Re(s) > 0) that the
// level-wise formulas reuse: G(s), Ghat(s), H0(s), their powers 0..C and a
// factorization of Z(s, C).
template <class Scalar>
struct BasicTransformContext {
    Scalar s{};
    QbdBlocks blocks;
    BasicGMatrices<Scalar> gmat;
    std::vector<MatrixOf<Scalar>> powers_G;    // G(s)^0 .. G(s)^C
    std::vector<MatrixOf<Scalar>> powers_Ghat; // Ghat(s)^0 .. Ghat(s)^C
    MatrixOf<Scalar> Z;
    Eigen::PartialPivLU<MatrixOf<Scalar>> Z_lu;

    const MatrixOf<Scalar>& G() const { return gmat.G; }
    const MatrixOf<Scalar>& Ghat() const { return gmat.Ghat; }
    const MatrixOf<Scalar>& H0() const { return gmat.H0; }
};

using TransformContext = BasicTransformContext<double>;
using ComplexTransformContext = BasicTransformContext<Complex>;

TransformContext make_transform_context(const QbdBlocks& blocks, double s,
                                        const SolverConfig& config = {});
ComplexTransformContext make_transform_context(const QbdBlocks& blocks, Complex s,
                                               const SolverConfig& config = {});

// nu_k(s, C) as the literal double sum, O(C) per level.
template <class Scalar>
VectorOf<Scalar> nu_k(const BasicTransformContext<Scalar>& ctx, const RewardSpec& rewards, int k);

// nu_0 .. nu_C by forward/backward recursion, O(C) in total.
template <class Scalar>
std::vector<VectorOf<Scalar>> nu_all(const BasicTransformContext<Scalar>& ctx,
                                     const RewardSpec& rewards);

// Z(s, C) as cached in the context.
template <class Scalar>
const MatrixOf<Scalar>& z_matrix(const BasicTransformContext<Scalar>& ctx) {
    return ctx.Z;
}

// Restriction of Q - sI to levels 0 and C (Schur complement over the interior
// levels).
Matrix censored_transient_generator(const QbdBlocks& blocks, double s);

// Relative Frobenius gap between Z(s, C) and the censored generator times
// [[I, Ghat^C], [G^C, I]].
double z_factorization_residual(const TransformContext& ctx);

template <class Scalar>
struct BoundaryVectors {
    VectorOf<Scalar> v;
    VectorOf<Scalar> w;
};

// Constants fixed by the level-0 and level-C boundary equations, given
// nu_0..nu_C for the same rewards.
template <class Scalar>
BoundaryVectors<Scalar> reward_boundary_vectors(const BasicTransformContext<Scalar>& ctx,
                                                const RewardSpec& rewards,
                                                const std::vector<VectorOf<Scalar>>& nu);

// Transform of the expected cumulative reward, conditional on the starting
// level: entries 0..C.
template <class Scalar>
std::vector<VectorOf<Scalar>> reward_transform(const BasicTransformContext<Scalar>& ctx,
                                               const RewardSpec& rewards);

// Reward rates for the level-unbounded process: g_k = head[k] for
// k < head.size(), and g_k = tail * ratio^(k - head.size()) beyond. An empty
// tail means zero rewards past the head.
struct RewardTail {
    std::vector<Vector> head;
    Vector tail;
    double ratio = 1.0;
    double tolerance = 1e-15;
    int max_terms = 1000000;
};

template <class Scalar>
VectorOf<Scalar> nu_unbounded(const BasicTransformContext<Scalar>& ctx, const RewardTail& rewards,
                              int k);

template <class Scalar>
VectorOf<Scalar> reward_transform_unbounded(const BasicTransformContext<Scalar>& ctx,
                                            const RewardTail& rewards, int k);

// Blocks of the transform of the transient deviation matrix,
//   (1/s)(sI - Q)^{-1} - (1/s^2) 1 pi.
template <class Scalar>
MatrixOf<Scalar> deviation_transform_block(const BasicTransformContext<Scalar>& ctx,
                                           const StationaryDistribution& pi, int k, int ell);

// Block column ell, levels 0..C.
template <class Scalar>
std::vector<MatrixOf<Scalar>> deviation_transform_column(const BasicTransformContext<Scalar>& ctx,
                                                         const StationaryDistribution& pi,
                                                         int ell);

template <class Scalar>
MatrixOf<Scalar> deviation_transform_full(const BasicTransformContext<Scalar>& ctx,
                                          const StationaryDistribution& pi);

// Level-unbounded block (k, ell). pi_ell is the unrestricted stationary block
// at level ell, or zero when the process has no stationary distribution.
template <class Scalar>
MatrixOf<Scalar> deviation_transform_unbounded(const BasicTransformContext<Scalar>& ctx,
                                               const RowVector& pi_ell, int k, int ell);

struct TimeDomainConfig {
    SolverConfig solver;
    InversionConfig inversion;
};

// R_0(t) .. R_C(t).
std::vector<Vector> reward_time(const QbdBlocks& blocks, const RewardSpec& rewards, double t,
                                const TimeDomainConfig& config = {});
Vector reward_time(const QbdBlocks& blocks, const RewardSpec& rewards, double t, int level,
                   const TimeDomainConfig& config = {});

// D(t) = int_0^t (exp(Qu) - 1 pi) du.
Matrix transient_deviation(const QbdBlocks& blocks, const StationaryDistribution& pi, double t,
                           const TimeDomainConfig& config = {});
Matrix transient_deviation_block(const QbdBlocks& blocks, const StationaryDistribution& pi,
                                 double t, int k, int ell, const TimeDomainConfig& config = {});

// V(t) = 1 pi t + D(t): expected time spent in each state during [0, t].
Matrix occupation_matrix(const QbdBlocks& blocks, const StationaryDistribution& pi, double t,
                         const TimeDomainConfig& config = {});

} // namespace qbdr
