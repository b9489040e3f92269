#include <gtest/gtest.h>

#include "support.hpp"

namespace qbdr {
namespace {

TEST(MapPh, ExampleHasFourPhases) {
    const QbdBlocks b = testing::example_model(5);
    EXPECT_EQ(b.n, 4);
    EXPECT_EQ(b.C, 5);
    EXPECT_TRUE(validate(b).ok());
    const Matrix Q = assemble_generator(b);
    EXPECT_LT(max_abs(Q * Vector::Ones(Q.rows())), 1e-12);
    EXPECT_TRUE(is_irreducible(Q));
}

TEST(MapPh, KroneckerLayout) {
    const MapParams map = example_map();
    const PhParams ph = example_ph();
    const QbdBlocks b = build_blocks(map, ph, 3);
    // Arrival phase a, service phase s sits at index 2a + s.
    EXPECT_DOUBLE_EQ(b.A1(0, 2), map.D1(0, 1));
    EXPECT_DOUBLE_EQ(b.A1(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(b.A0(0, 1), ph.T(0, 1));
    EXPECT_DOUBLE_EQ(b.A0(0, 2), map.D0(0, 1));
    EXPECT_DOUBLE_EQ(b.A0(0, 0), map.D0(0, 0) + ph.T(0, 0));
    EXPECT_DOUBLE_EQ(b.A_minus1(1, 0), ph.t_exit()(1) * ph.tau(0));
    EXPECT_DOUBLE_EQ(b.B0(0, 2), map.D0(0, 1));
    EXPECT_DOUBLE_EQ(b.C0(0, 2), map.D0(0, 1) + map.D1(0, 1));
}

TEST(MapPh, RenewalMap) {
    const MapParams m = example_map();
    EXPECT_DOUBLE_EQ(m.D0(0, 0), -10.0);
    EXPECT_DOUBLE_EQ(m.D0(1, 0), 1.0);
    // Exit rates 8 and 5 times alpha = (0.8, 0.2).
    EXPECT_NEAR(m.D1(0, 0), 6.4, 1e-15);
    EXPECT_NEAR(m.D1(1, 1), 1.0, 1e-15);
    EXPECT_NO_THROW(validate_map(m));
}

TEST(MapPh, BlockingRegimes) {
    const auto high = classify_drift(testing::example_model(5));
    EXPECT_EQ(high.tag, DriftTag::Transient);
    const double down = (high.alpha * testing::example_model(5).A_minus1).sum();
    const double up = (high.alpha * testing::example_model(5).A1).sum();
    EXPECT_LT(down, up);
    EXPECT_EQ(classify_drift(testing::swapped_model(5)).tag, DriftTag::PositiveRecurrent);
}

TEST(MapPh, SwappedExchangesLaws) {
    EXPECT_EQ(swapped_map().D0, example_ph().T);
    EXPECT_EQ(swapped_ph().T, example_map().D0);
}

TEST(MapPh, LostRevenueRewards) {
    const QbdBlocks b = testing::example_model(5);
    const RewardSpec r = lost_revenue_rewards(b, 2.0);
    ASSERT_EQ(r.g.size(), 6u);
    for (int k = 0; k < 5; ++k) EXPECT_EQ(r.g[k].squaredNorm(), 0.0);
    EXPECT_LT(max_abs(r.g[5] - 2.0 * b.A1.rowwise().sum()), 1e-15);
    EXPECT_THROW(lost_revenue_rewards(b, -1.0), Error);
}

TEST(MapPh, GainedRevenueRewards) {
    const QbdBlocks b = testing::example_model(3);
    const RewardSpec r = gained_revenue_rewards(b, 1.0, 0.5);
    EXPECT_LT(max_abs(r.g[0] - b.A1.rowwise().sum()), 1e-15);
    EXPECT_LT(max_abs(r.g[2] - (b.A1.rowwise().sum() + Vector::Constant(4, 1.0))), 1e-15);
    EXPECT_LT(max_abs(r.g[3] - Vector::Constant(4, 1.5)), 1e-15);
}

TEST(MapPh, InvalidParametersRejected) {
    MapParams m = example_map();
    m.D1(0, 0) = -1.0;
    EXPECT_THROW(validate_map(m), Error);
    PhParams p = example_ph();
    p.tau(0) = 0.9;
    EXPECT_THROW(validate_ph(p), Error);
    p = example_ph();
    p.T(0, 1) = 5.0;
    EXPECT_THROW(validate_ph(p), Error);
    try {
        build_blocks(example_map(), example_ph(), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Parameter);
    }
}

} // namespace
} // namespace qbdr
