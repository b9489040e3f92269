#include <gtest/gtest.h>

#include <limits>

#include "support.hpp"

namespace qbdr {
namespace {

using testing::example_model;
using testing::scalar_model;
using testing::swapped_model;

TEST(QbdModel, ExampleModelsValidate) {
    EXPECT_TRUE(validate(example_model(5)).ok());
    EXPECT_TRUE(validate(swapped_model(5)).ok());
    EXPECT_TRUE(validate(scalar_model(1.0, 2.0, 3)).ok());
}

TEST(QbdModel, RandomModelsValidate) {
    for (const auto& b : testing::random_pool(20, 4, 10, 11)) {
        const auto report = validate(b);
        EXPECT_TRUE(report.ok());
        EXPECT_TRUE(report.warnings.empty());
    }
}

TEST(QbdModel, NegativeOffDiagonalReported) {
    QbdBlocks b = scalar_model(1.0, 2.0, 3);
    b.A1(0, 0) = -0.5;
    const auto report = validate(b);
    ASSERT_FALSE(report.ok());
    bool found = false;
    for (const auto& issue : report.issues) {
        if (issue.kind == ValidationIssue::Kind::Negativity && issue.block == "A1") {
            found = true;
            EXPECT_EQ(issue.row, 0);
            EXPECT_EQ(issue.col, 0);
            EXPECT_DOUBLE_EQ(issue.magnitude, 0.5);
        }
    }
    EXPECT_TRUE(found);
}

TEST(QbdModel, NonConservativeRowReported) {
    QbdBlocks b = scalar_model(1.0, 2.0, 3);
    b.A0(0, 0) = -2.5;
    const auto report = validate(b);
    ASSERT_FALSE(report.ok());
    bool found = false;
    for (const auto& issue : report.issues) {
        if (issue.kind == ValidationIssue::Kind::Conservativity) {
            found = true;
            EXPECT_NEAR(issue.magnitude, 0.5, 1e-15);
        }
    }
    EXPECT_TRUE(found);
}

TEST(QbdModel, DimensionMismatchReported) {
    QbdBlocks b = example_model(3);
    b.C0 = Matrix::Zero(3, 3);
    const auto report = validate(b);
    ASSERT_FALSE(report.ok());
    EXPECT_EQ(report.issues.front().kind, ValidationIssue::Kind::Dimension);
    EXPECT_THROW(assemble_generator(b), Error);
}

TEST(QbdModel, NonFiniteReported) {
    QbdBlocks b = scalar_model(1.0, 2.0, 3);
    b.B0(0, 0) = std::numeric_limits<double>::quiet_NaN();
    const auto report = validate(b);
    ASSERT_FALSE(report.ok());
    bool found = false;
    for (const auto& issue : report.issues) found |= issue.kind == ValidationIssue::Kind::NonFinite;
    EXPECT_TRUE(found);
}

TEST(QbdModel, CapacityReported) {
    QbdBlocks b = scalar_model(1.0, 2.0, 3);
    b.C = 0;
    EXPECT_FALSE(validate(b).ok());
}

TEST(QbdModel, RewardShapeChecked) {
    const QbdBlocks b = example_model(3);
    EXPECT_TRUE(validate(b, RewardSpec::constant(4, 3, 1.0)).ok());
    EXPECT_FALSE(validate(b, RewardSpec::constant(4, 2, 1.0)).ok());
    EXPECT_FALSE(validate(b, RewardSpec::constant(3, 3, 1.0)).ok());
}

TEST(QbdModel, ReducibleGeneratorWarns) {
    QbdBlocks b = scalar_model(1.0, 2.0, 3);
    b.A1.setZero();
    b.A0(0, 0) = -2.0;
    b.B0.setZero();
    const auto report = validate(b);
    EXPECT_TRUE(report.ok());
    EXPECT_FALSE(report.warnings.empty());
}

TEST(QbdModel, AssembledGeneratorHasBlockLayout) {
    const QbdBlocks b = example_model(4);
    const Matrix Q = assemble_generator(b);
    ASSERT_EQ(Q.rows(), b.size());
    EXPECT_LT(max_abs(Q * Vector::Ones(Q.rows())), 1e-12);
    EXPECT_EQ(Matrix(level_block(Q, 4, 0, 0)), b.B0);
    EXPECT_EQ(Matrix(level_block(Q, 4, 2, 1)), b.A_minus1);
    EXPECT_EQ(Matrix(level_block(Q, 4, 2, 2)), b.A0);
    EXPECT_EQ(Matrix(level_block(Q, 4, 2, 3)), b.A1);
    EXPECT_EQ(Matrix(level_block(Q, 4, 4, 4)), b.C0);
    EXPECT_EQ(max_abs(level_block(Q, 4, 0, 2)), 0.0);
    EXPECT_TRUE(is_irreducible(Q));
}

TEST(QbdModel, WithCapacityKeepsBlocks) {
    const QbdBlocks b = example_model(4);
    const QbdBlocks c = b.with_capacity(7);
    EXPECT_EQ(c.C, 7);
    EXPECT_EQ(c.A0, b.A0);
    EXPECT_EQ(c.size(), 32);
}

TEST(QbdModel, DriftClassification) {
    EXPECT_EQ(classify_drift(scalar_model(1.0, 2.0, 3)).tag, DriftTag::PositiveRecurrent);
    EXPECT_EQ(classify_drift(scalar_model(2.0, 1.0, 3)).tag, DriftTag::Transient);
    EXPECT_EQ(classify_drift(scalar_model(1.5, 1.5, 3)).tag, DriftTag::NullRecurrent);
    const auto high = classify_drift(example_model(5));
    EXPECT_EQ(high.tag, DriftTag::Transient);
    EXPECT_GT(high.mean_drift, 0.0);
    EXPECT_NEAR(high.alpha.sum(), 1.0, 1e-12);
    EXPECT_EQ(classify_drift(swapped_model(5)).tag, DriftTag::PositiveRecurrent);
}

TEST(QbdModel, DriftOfReducibleAThrows) {
    QbdBlocks b = example_model(3);
    // A-1 + A0 + A1 becomes block diagonal in the arrival phase.
    b.A1 = Matrix::Identity(4, 4);
    b.A0 = kron_sum(Matrix::Zero(2, 2), example_ph().T);
    b.A0.diagonal().array() -= 1.0;
    try {
        classify_drift(b);
        FAIL() << "expected a model error";
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::Model);
    }
}

TEST(QbdModel, RewardSpecHelpers) {
    const RewardSpec r = RewardSpec::constant(2, 3, 1.5);
    ASSERT_EQ(r.g.size(), 4u);
    EXPECT_EQ(r.stacked().size(), 8);
    EXPECT_DOUBLE_EQ(r.stacked().sum(), 12.0);
    EXPECT_DOUBLE_EQ(RewardSpec::zero(2, 3).stacked().squaredNorm(), 0.0);
}

TEST(QbdModel, ErrorCategoryNames) {
    EXPECT_EQ(to_string(ErrorCategory::Parse), "parse");
    EXPECT_EQ(to_string(ErrorCategory::AsymptoticsUndefined), "asymptotics-undefined");
    EXPECT_EQ(to_string(DriftTag::NullRecurrent), to_string(DriftTag::NullRecurrent));
}

} // namespace
} // namespace qbdr
