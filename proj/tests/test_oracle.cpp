#include <gtest/gtest.h>

#include "support.hpp"

namespace qbdr {
namespace {

Matrix two_state(double a, double b) {
    Matrix Q(2, 2);
    Q << -a, a, b, -b;
    return Q;
}

TEST(Oracle, TwoStateStationary) {
    const RowVector pi = oracle::stationary(two_state(1.0, 3.0));
    EXPECT_NEAR(pi(0), 0.75, 1e-15);
    EXPECT_NEAR(pi(1), 0.25, 1e-15);
}

TEST(Oracle, TwoStateDeviation) {
    const Matrix Q = two_state(1.0, 1.0);
    const Matrix D = oracle::deviation(Q, oracle::stationary(Q));
    EXPECT_NEAR(D(0, 0), 0.25, 1e-12);
    EXPECT_NEAR(D(0, 1), -0.25, 1e-12);
    EXPECT_NEAR(D(1, 0), -0.25, 1e-12);
    EXPECT_NEAR(D(1, 1), 0.25, 1e-12);
}

TEST(Oracle, ReducibleRejected) {
    Matrix Q = Matrix::Zero(3, 3);
    Q(0, 1) = 1.0;
    Q(0, 0) = -1.0;
    EXPECT_THROW(oracle::stationary(Q), Error);
}

TEST(Oracle, ExpmMatchesClosedForm) {
    const double a = 2.0;
    const double b = 0.5;
    const double t = 1.3;
    const Matrix P = oracle::expm(two_state(a, b) * t);
    const double e = std::exp(-(a + b) * t);
    EXPECT_NEAR(P(0, 0), (b + a * e) / (a + b), 1e-14);
    EXPECT_NEAR(P(1, 0), (b - b * e) / (a + b), 1e-14);
}

TEST(Oracle, QuadratureMatchesClosedForm) {
    const Matrix Q = assemble_generator(testing::example_model(2));
    const RowVector pi = oracle::stationary(Q);
    const Matrix D = oracle::deviation(Q, pi);
    for (double t : {0.1, 1.0, 10.0}) {
        EXPECT_LT(max_abs(oracle::transient_deviation(Q, pi, t) - oracle::transient_deviation_closed(Q, D, t)),
                  1e-9);
    }
}

TEST(Oracle, RewardRk4MatchesDeviationForm) {
    const Matrix Q = assemble_generator(random_model(2, 3, 4));
    const RowVector pi = oracle::stationary(Q);
    const Matrix D = oracle::deviation(Q, pi);
    const Vector g = Vector::LinSpaced(Q.rows(), 0.0, 1.0);
    const double t = 3.0;
    const Vector ref = oracle::reward_from_deviation(pi, oracle::transient_deviation_closed(Q, D, t), g, t);
    EXPECT_LT(max_abs(oracle::reward(Q, g, t) - ref), 1e-10);
}

TEST(Oracle, PassageOnBirthDeathChain) {
    const QbdBlocks b = testing::scalar_model(1.0, 2.0, 2);
    const Vector m = oracle::passage(assemble_generator(b), 2);
    // m1 = 1/3 + (2/3) m0, m0 = 1 + m1  =>  m1 = 3, m0 = 4.
    EXPECT_NEAR(m(0), 4.0, 1e-12);
    EXPECT_NEAR(m(1), 3.0, 1e-12);
    EXPECT_EQ(m(2), 0.0);
}

TEST(Oracle, ResolventInvertsShiftedGenerator) {
    const Matrix Q = assemble_generator(testing::example_model(2));
    const Matrix X = oracle::resolvent(Q, 0.7);
    const auto N = Q.rows();
    EXPECT_LT(max_abs((0.7 * Matrix::Identity(N, N) - Q) * X - Matrix::Identity(N, N)), 1e-12);
}

TEST(Oracle, SizeLimit) {
    oracle::OracleConfig cfg;
    cfg.max_states = 4;
    EXPECT_THROW(oracle::stationary(assemble_generator(testing::example_model(2)), cfg), Error);
}

} // namespace
} // namespace qbdr
