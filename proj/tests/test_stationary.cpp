#include <gtest/gtest.h>

#include "support.hpp"

namespace qbdr {
namespace {

TEST(Stationary, ScalarAnchor) {
    const auto st = stationary_rmatrix(testing::scalar_model(1.0, 2.0, 2));
    ASSERT_EQ(st.pi.size(), 3u);
    EXPECT_NEAR(st.pi[0](0), 4.0 / 7.0, 1e-12);
    EXPECT_NEAR(st.pi[1](0), 2.0 / 7.0, 1e-12);
    EXPECT_NEAR(st.pi[2](0), 1.0 / 7.0, 1e-12);
}

TEST(Stationary, MatchesOracleOnRandomModels) {
    for (const auto& b : testing::random_pool(30, 4, 20, 31)) {
        const RowVector pi = stationary_rmatrix(b).stacked();
        const RowVector ref = oracle::stationary(assemble_generator(b));
        EXPECT_LT(max_abs(pi - ref), 1e-10) << "n=" << b.n << " C=" << b.C;
        EXPECT_NEAR(pi.sum(), 1.0, 1e-12);
        EXPECT_GE(pi.minCoeff(), 0.0);
    }
}

TEST(Stationary, MatchesOracleOnExamples) {
    for (int C : {1, 2, 5, 30}) {
        for (const auto& b : {testing::example_model(C), testing::swapped_model(C)}) {
            const RowVector pi = stationary_rmatrix(b).stacked();
            const RowVector ref = oracle::stationary(assemble_generator(b));
            EXPECT_LT(max_abs(pi - ref), 1e-10);
        }
    }
}

TEST(Stationary, NullRecurrentRejected) {
    try {
        stationary_rmatrix(testing::scalar_model(1.5, 1.5, 6));
        FAIL() << "expected asymptotics-undefined";
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::AsymptoticsUndefined);
    }
}

TEST(Stationary, StackedRoundTrip) {
    const auto st = stationary_rmatrix(testing::example_model(4));
    const auto back = StationaryDistribution::from_stacked(st.stacked(), 4);
    ASSERT_EQ(back.pi.size(), st.pi.size());
    for (std::size_t k = 0; k < st.pi.size(); ++k) EXPECT_EQ(back.pi[k], st.pi[k]);
}

TEST(Stationary, BoundaryMatrixHasRankDeficiencyOne) {
    const QbdBlocks b = testing::example_model(6);
    const auto gm = compute_gmatrices(b, 0.0);
    const Matrix M = stationary_boundary_matrix(b, rate_matrices(b, gm.G, gm.Ghat));
    Eigen::FullPivLU<Matrix> lu(M);
    lu.setThreshold(1e-10);
    EXPECT_EQ(lu.rank(), M.rows() - 1);
}

TEST(Stationary, UnboundedIsLimitOfFinite) {
    const QbdBlocks b = testing::swapped_model(200);
    const auto gm = compute_gmatrices(b, 0.0);
    const auto unb = stationary_unbounded(b, gm);
    const auto fin = stationary_rmatrix(b, gm);
    for (int k = 0; k < 6; ++k) EXPECT_LT(max_abs(unb.level(k) - fin.pi[k]), 1e-10);
}

TEST(Stationary, UnboundedRequiresPositiveRecurrence) {
    const QbdBlocks b = testing::example_model(5);
    const auto gm = compute_gmatrices(b, 0.0);
    try {
        stationary_unbounded(b, gm);
        FAIL() << "expected precondition error";
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Precondition);
    }
}

} // namespace
} // namespace qbdr
