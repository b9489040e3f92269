#include <gtest/gtest.h>

#include <cmath>

#include "qbdr/laplace_inversion.hpp"

namespace qbdr {
namespace {

TEST(LaplaceInversion, Exponential) {
    for (double t : {0.1, 1.0, 5.0, 20.0}) {
        const double v = invert_laplace_scalar([](Complex s) { return 1.0 / (s + 1.0); }, t);
        EXPECT_NEAR(v, std::exp(-t), 1e-7);
    }
}

TEST(LaplaceInversion, Ramp) {
    for (double t : {0.1, 1.0, 10.0, 100.0}) {
        const double v = invert_laplace_scalar([](Complex s) { return 1.0 / (s * s); }, t);
        EXPECT_NEAR(v, t, 1e-7 * std::max(1.0, t));
    }
}

TEST(LaplaceInversion, Oscillation) {
    const double v = invert_laplace_scalar([](Complex s) { return 1.0 / (s * s + 1.0); }, 2.0);
    EXPECT_NEAR(v, std::sin(2.0), 1e-7);
}

TEST(LaplaceInversion, VectorValued) {
    const TransformEvaluator f = [](Complex s) {
        CVector out(2);
        out << 1.0 / s, 1.0 / (s + 2.0);
        return out;
    };
    const Vector v = invert_laplace(f, 0.7);
    EXPECT_NEAR(v(0), 1.0, 1e-7);
    EXPECT_NEAR(v(1), std::exp(-1.4), 1e-7);
}

TEST(LaplaceInversion, ParallelMatchesSerial) {
    const TransformEvaluator f = [](Complex s) {
        CVector out(1);
        out << 1.0 / (s * (s + 1.0));
        return out;
    };
    InversionConfig par;
    par.parallel = true;
    EXPECT_EQ(invert_laplace(f, 3.0)(0), invert_laplace(f, 3.0, par)(0));
}

TEST(LaplaceInversion, RejectsBadArguments) {
    const auto f = [](Complex s) { return 1.0 / s; };
    try {
        invert_laplace_scalar(f, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Precondition);
    }
    InversionConfig cfg;
    cfg.series_terms = 5;
    cfg.euler_terms = 5;
    try {
        invert_laplace_scalar(f, 1.0, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Parameter);
    }
}

} // namespace
} // namespace qbdr
