#include <gtest/gtest.h>

#include "support.hpp"

namespace qbdr {
namespace {

using testing::stack;

CMatrix dense_resolvent(const Matrix& Q, Complex s) {
    const auto N = Q.rows();
    return (s * CMatrix::Identity(N, N) - Q.cast<Complex>()).partialPivLu().inverse();
}

Matrix dense_deviation_transform(const Matrix& Q, const RowVector& pi, double s) {
    const auto N = Q.rows();
    return oracle::resolvent(Q, s) / s - Vector::Ones(N) * pi / (s * s);
}

RewardSpec random_rewards(int n, int C, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 2.0);
    RewardSpec r;
    for (int k = 0; k <= C; ++k) {
        Vector g(n);
        for (int i = 0; i < n; ++i) g(i) = unif(rng);
        r.g.push_back(g);
    }
    return r;
}

TEST(TransformReward, NuRecursionMatchesDoubleSum) {
    for (const auto& b : testing::random_pool(10, 4, 12, 41)) {
        const auto ctx = make_transform_context(b, 0.6);
        const RewardSpec r = random_rewards(b.n, b.C, 1);
        const auto all = nu_all(ctx, r);
        for (int k = 0; k <= b.C; ++k) EXPECT_LT(max_abs(all[k] - nu_k(ctx, r, k)), 1e-12);
    }
}

TEST(TransformReward, RewardTransformMatchesResolvent) {
    for (const auto& b : testing::random_pool(15, 4, 15, 42)) {
        const Matrix Q = assemble_generator(b);
        const RewardSpec r = random_rewards(b.n, b.C, 2);
        for (double s : {0.1, 1.0, 10.0}) {
            const auto ctx = make_transform_context(b, s);
            const Vector got = stack(reward_transform(ctx, r));
            const Vector ref = oracle::resolvent(Q, s) * r.stacked() / s;
            EXPECT_LT(relative_frobenius(got, ref), 1e-10);
        }
    }
}

TEST(TransformReward, ComplexRewardTransformMatchesResolvent) {
    const QbdBlocks b = testing::example_model(5);
    const Matrix Q = assemble_generator(b);
    const RewardSpec r = lost_revenue_rewards(b, 1.0);
    const Complex s(0.4, 2.5);
    const auto ctx = make_transform_context(b, s);
    const CVector got = testing::stack_complex(reward_transform(ctx, r));
    const CVector ref = dense_resolvent(Q, s) * r.stacked().cast<Complex>() / s;
    EXPECT_LT((got - ref).norm() / ref.norm(), 1e-10);
}

TEST(TransformReward, DeviationTransformMatchesDense) {
    for (const auto& b : testing::random_pool(15, 4, 12, 43)) {
        const Matrix Q = assemble_generator(b);
        const auto st = stationary_rmatrix(b);
        for (double s : {0.1, 1.0, 10.0}) {
            const auto ctx = make_transform_context(b, s);
            const Matrix got = deviation_transform_full(ctx, st);
            const Matrix ref = dense_deviation_transform(Q, st.stacked(), s);
            EXPECT_LT(relative_frobenius(got, ref), 1e-9) << "n=" << b.n << " C=" << b.C << " s=" << s;
        }
    }
}

TEST(TransformReward, DeviationColumnMatchesBlocks) {
    const QbdBlocks b = testing::example_model(4);
    const auto st = stationary_rmatrix(b);
    const auto ctx = make_transform_context(b, 0.5);
    for (int ell = 0; ell <= b.C; ++ell) {
        const auto col = deviation_transform_column(ctx, st, ell);
        for (int k = 0; k <= b.C; ++k) {
            EXPECT_LT(max_abs(col[k] - deviation_transform_block(ctx, st, k, ell)), 1e-13);
        }
    }
}

TEST(TransformReward, DeviationTransformRowsSumToZeroTimesS) {
    // (sI - Q)^{-1} 1 = 1/s, so D~(s) 1 = 0.
    const QbdBlocks b = testing::swapped_model(6);
    const auto ctx = make_transform_context(b, 0.3);
    const Matrix D = deviation_transform_full(ctx, stationary_rmatrix(b));
    EXPECT_LT(max_abs(D * Vector::Ones(D.cols())), 1e-10);
}

TEST(TransformReward, ZFactorization) {
    for (const auto& b : testing::random_pool(10, 4, 10, 44)) {
        for (double s : {0.1, 2.0}) {
            const auto ctx = make_transform_context(b, s);
            EXPECT_LT(z_factorization_residual(ctx), 1e-10);
        }
    }
}

TEST(TransformReward, ContextRejectsNonPositiveS) {
    try {
        make_transform_context(testing::example_model(3), 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Precondition);
    }
}

TEST(TransformReward, RewardTimeMatchesRk4) {
    for (const auto& b : {testing::example_model(3), testing::swapped_model(2),
                          random_model(2, 4, 5)}) {
        const Matrix Q = assemble_generator(b);
        const RewardSpec r = random_rewards(b.n, b.C, 3);
        for (double t : {0.1, 1.0, 10.0}) {
            const Vector got = stack(reward_time(b, r, t));
            const Vector ref = oracle::reward(Q, r.stacked(), t);
            EXPECT_LT(max_abs(got - ref), 1e-6) << "t=" << t;
        }
    }
}

TEST(TransformReward, RewardTimeSingleLevel) {
    const QbdBlocks b = testing::example_model(4);
    const RewardSpec r = lost_revenue_rewards(b, 1.0);
    const auto all = reward_time(b, r, 2.0);
    EXPECT_LT(max_abs(reward_time(b, r, 2.0, 3) - all[3]), 1e-10);
}

TEST(TransformReward, ZeroTimeGivesZero) {
    const QbdBlocks b = testing::example_model(2);
    const auto st = stationary_rmatrix(b);
    EXPECT_EQ(max_abs(stack(reward_time(b, RewardSpec::constant(4, 2, 1.0), 0.0))), 0.0);
    EXPECT_EQ(max_abs(transient_deviation(b, st, 0.0)), 0.0);
}

TEST(TransformReward, TransientDeviationMatchesClosedForm) {
    for (const auto& b : {testing::example_model(3), random_model(3, 3, 8)}) {
        const Matrix Q = assemble_generator(b);
        const auto st = stationary_rmatrix(b);
        const Matrix D = oracle::deviation(Q, st.stacked());
        for (double t : {0.1, 1.0, 10.0}) {
            const Matrix got = transient_deviation(b, st, t);
            EXPECT_LT(max_abs(got - oracle::transient_deviation_closed(Q, D, t)), 1e-6);
        }
        EXPECT_LT(max_abs(transient_deviation_block(b, st, 1.5, 1, 2) -
                          level_block(transient_deviation(b, st, 1.5), b.n, 1, 2)),
                  1e-10);
    }
}

TEST(TransformReward, OccupationRowsSumToT) {
    const QbdBlocks b = testing::example_model(3);
    const auto st = stationary_rmatrix(b);
    const Matrix V = occupation_matrix(b, st, 4.0);
    EXPECT_LT(max_abs(V * Vector::Ones(V.cols()) - Vector::Constant(V.rows(), 4.0)), 1e-6);
    EXPECT_GE(V.minCoeff(), -1e-6);
}

TEST(TransformReward, UnboundedRewardLimit) {
    const QbdBlocks pr = testing::scalar_model(1.0, 2.0, 200);
    const auto ctx = make_transform_context(pr, 0.5);
    RewardTail tail;
    tail.head = {Vector::Constant(1, 1.0), Vector::Constant(1, 2.0)};
    tail.tail = Vector::Constant(1, 0.5);
    tail.ratio = 0.9;
    RewardSpec finite;
    for (int k = 0; k <= 200; ++k) {
        if (k < 2) {
            finite.g.push_back(tail.head[k]);
        } else {
            finite.g.push_back(tail.tail * std::pow(0.9, k - 2));
        }
    }
    const auto fin = reward_transform(ctx, finite);
    for (int k = 0; k <= 5; ++k) {
        EXPECT_LT(max_abs(reward_transform_unbounded(ctx, tail, k) - fin[k]), 1e-8);
    }
}

TEST(TransformReward, UnboundedDeviationLimit) {
    for (const auto& b : {testing::scalar_model(1.0, 2.0, 200), testing::scalar_model(2.0, 1.0, 200)}) {
        const bool pr = classify_drift(b).tag == DriftTag::PositiveRecurrent;
        const auto st = stationary_rmatrix(b);
        const auto ctx = make_transform_context(b, 0.5);
        for (int ell = 0; ell <= 5; ++ell) {
            const RowVector pi_ell = pr ? RowVector(st.pi[ell]) : RowVector::Zero(1);
            for (int k = 0; k <= 5; ++k) {
                const Matrix fin = deviation_transform_block(ctx, st, k, ell);
                const Matrix unb = deviation_transform_unbounded(ctx, pi_ell, k, ell);
                EXPECT_LT(max_abs(fin - unb), 1e-6) << "k=" << k << " l=" << ell;
            }
        }
    }
}

TEST(TransformReward, DivergentTailReported) {
    const QbdBlocks b = testing::scalar_model(2.0, 1.0, 5);
    const auto ctx = make_transform_context(b, 1e-3);
    RewardTail tail;
    tail.tail = Vector::Constant(1, 1.0);
    tail.ratio = 1.5;
    tail.max_terms = 1000;
    try {
        reward_transform_unbounded(ctx, tail, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::TailConvergence);
    }
}

} // namespace
} // namespace qbdr
