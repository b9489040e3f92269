#include <gtest/gtest.h>

#include "support.hpp"

namespace qbdr {
namespace {

using testing::scalar_model;

double scalar_root(double up, double down, double s) {
    const double a = up + down + s;
    return (a - std::sqrt(a * a - 4.0 * up * down)) / (2.0 * up);
}

TEST(MatrixEquations, ScalarAnchors) {
    const QbdBlocks b = scalar_model(1.0, 2.0, 2);
    const GMatrices gm = compute_gmatrices(b, 0.0);
    EXPECT_NEAR(gm.G(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(gm.Ghat(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(gm.H0(0, 0), 1.0, 1e-12);
}

TEST(MatrixEquations, ScalarClosedFormAtPositiveS) {
    for (double s : {0.1, 1.0, 10.0}) {
        const QbdBlocks b = scalar_model(1.3, 0.7, 2);
        const auto g = solve_g(b, s);
        const auto gh = solve_ghat(b, s);
        EXPECT_NEAR(g.X(0, 0), scalar_root(1.3, 0.7, s), 1e-13);
        EXPECT_NEAR(gh.X(0, 0), scalar_root(0.7, 1.3, s), 1e-13);
    }
}

TEST(MatrixEquations, AlgorithmsAgree) {
    SolverConfig fi;
    fi.algorithm = QuadraticAlgorithm::FunctionalIteration;
    for (const auto& b : testing::random_pool(10, 4, 5, 21)) {
        for (double s : {0.0, 0.5}) {
            const auto lr = solve_g(b, s);
            const auto it = solve_g(b, s, fi);
            EXPECT_LT(max_abs(lr.X - it.X), 1e-9);
            EXPECT_LT(lr.residual, 1e-12);
        }
    }
}

TEST(MatrixEquations, StochasticityMatchesDrift) {
    for (const auto& b : testing::random_pool(10, 4, 5, 22)) {
        const auto drift = classify_drift(b);
        const auto gm = compute_gmatrices(b, 0.0);
        const Vector ones = Vector::Ones(b.n);
        const double g_def = max_abs(gm.G * ones - ones);
        const double gh_def = max_abs(gm.Ghat * ones - ones);
        if (drift.tag == DriftTag::PositiveRecurrent) {
            EXPECT_LT(g_def, 1e-10);
            EXPECT_GT(gh_def, 1e-8);
        } else if (drift.tag == DriftTag::Transient) {
            EXPECT_GT(g_def, 1e-8);
            EXPECT_LT(gh_def, 1e-10);
        }
        EXPECT_GE(gm.G.minCoeff(), -1e-14);
        EXPECT_GE(gm.Ghat.minCoeff(), -1e-14);
    }
}

TEST(MatrixEquations, ComplexResidual) {
    for (const auto& b : testing::random_pool(5, 4, 5, 23)) {
        const Complex s(0.7, 3.1);
        const auto g = solve_g(b, s);
        EXPECT_LT(quadratic_residual(b.A_minus1, b.A0, b.A1, s, g.X), 1e-11);
        const auto gh = solve_ghat(b, s);
        EXPECT_LT(quadratic_residual(b.A1, b.A0, b.A_minus1, s, gh.X), 1e-11);
    }
}

TEST(MatrixEquations, ComplexMatchesRealOnAxis) {
    const QbdBlocks b = testing::example_model(3);
    const auto real = compute_gmatrices(b, 0.8);
    const auto cplx = compute_gmatrices(b, Complex(0.8, 0.0));
    EXPECT_LT(max_abs(real.G - cplx.G.real()), 1e-12);
    EXPECT_LT(max_abs(real.H0 - cplx.H0.real()), 1e-10);
    EXPECT_LT(max_abs(cplx.H0.imag()), 1e-12);
}

TEST(MatrixEquations, SpectralRadiusBelowOneForPositiveS) {
    const QbdBlocks b = testing::example_model(3);
    const auto gm = compute_gmatrices(b, 0.3);
    EXPECT_LT(spectral_radius(gm.G), 1.0);
    EXPECT_LT(spectral_radius(gm.Ghat), 1.0);
}

TEST(MatrixEquations, NullRecurrentH0Undefined) {
    const QbdBlocks b = scalar_model(1.5, 1.5, 3);
    try {
        compute_gmatrices(b, 0.0);
        FAIL() << "expected asymptotics-undefined";
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::AsymptoticsUndefined);
    }
    EXPECT_NO_THROW(compute_gmatrices(b, 0.5));
}

TEST(MatrixEquations, RateMatricesSolveTheirEquations) {
    for (const auto& b : testing::random_pool(8, 4, 5, 24)) {
        const auto gm = compute_gmatrices(b, 0.0);
        const auto r = rate_matrices(b, gm.G, gm.Ghat);
        EXPECT_LT(max_abs(b.A1 + r.R * b.A0 + r.R * r.R * b.A_minus1), 1e-10);
        EXPECT_LT(max_abs(b.A_minus1 + r.Rhat * b.A0 + r.Rhat * r.Rhat * b.A1), 1e-10);
    }
}

TEST(MatrixEquations, IterationLimitCarriesResidual) {
    SolverConfig cfg;
    cfg.algorithm = QuadraticAlgorithm::FunctionalIteration;
    cfg.max_iterations = 2;
    try {
        solve_g(testing::example_model(3), 0.0, cfg);
        FAIL() << "expected iteration limit";
    } catch (const IterationLimitError& e) {
        EXPECT_EQ(e.category(), ErrorCategory::IterationLimit);
        EXPECT_GT(e.last_residual(), 0.0);
        EXPECT_EQ(e.iterations(), 2);
    }
}

TEST(MatrixEquations, RejectsBadInput) {
    SolverConfig cfg;
    cfg.tolerance = 0.0;
    EXPECT_THROW(solve_g(testing::example_model(3), 0.0, cfg), Error);
    EXPECT_THROW(solve_g(testing::example_model(3), -1.0), Error);
}

} // namespace
} // namespace qbdr
