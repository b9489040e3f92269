#pragma once

#include <string>
#include <vector>

#include "qbdr/types.hpp"

namespace qbdr {

// Level-independent finite QBD with levels 0..C and n phases per level.
// Phases are 0-based; phase j of the usual 1..n numbering is index j-1.
//
//        | B0   A1                |
//        | A-1  A0   A1           |
//   Q =  |      ...  ...  ...     |
//        |           A-1  A0  A1  |
//        |                A-1 C0  |
struct QbdBlocks {
    int n = 0;
    int C = 0;
    Matrix A_minus1;
    Matrix A0;
    Matrix A1;
    Matrix B0;
    Matrix C0;

    int size() const noexcept { return n * (C + 1); }

    // Same blocks, different capacity.
    QbdBlocks with_capacity(int capacity) const;
};

// Per-level reward (or loss) rates g_0..g_C.
struct RewardSpec {
    std::vector<Vector> g;

    static RewardSpec zero(int n, int C);
    // Uniform rate c in every state.
    static RewardSpec constant(int n, int C, double c);

    // Stacked (C+1)n vector.
    Vector stacked() const;
};

enum class DriftTag { PositiveRecurrent, Transient, NullRecurrent };

std::string_view to_string(DriftTag tag) noexcept;

struct DriftClass {
    DriftTag tag = DriftTag::PositiveRecurrent;
    double mean_drift = 0.0; // alpha A1 1 - alpha A-1 1
    RowVector alpha;         // stationary vector of A-1 + A0 + A1
};

inline constexpr double kDefaultDriftTolerance = 1e-10;
inline constexpr double kConservativityTolerance = 1e-12;

struct ValidationIssue {
    enum class Kind { Dimension, Negativity, Conservativity, NonFinite, Capacity };
    Kind kind;
    std::string block; // "A_minus1", "A0", ... or the row group "[A_minus1|A0|A1]"
    int row = -1;
    int col = -1;
    double magnitude = 0.0;

    std::string describe() const;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    // Non-fatal findings (reducibility of the assembled generator).
    std::vector<std::string> warnings;

    bool ok() const noexcept { return issues.empty(); }
};

ValidationReport validate(const QbdBlocks& blocks);
ValidationReport validate(const QbdBlocks& blocks, const RewardSpec& rewards);

// Throws Error{Structural} on dimension mismatch.
Matrix assemble_generator(const QbdBlocks& blocks);

// Strongly connected check on the nonzero pattern of a generator.
bool is_irreducible(const Matrix& generator);

// Throws Error{Model} when A = A-1 + A0 + A1 is reducible.
DriftClass classify_drift(const QbdBlocks& blocks,
                          double tolerance = kDefaultDriftTolerance);

// Blocks of a stacked level-structured vector / matrix.
inline auto level_block(const Vector& v, int n, int k) { return v.segment(k * n, n); }
inline auto level_block(const Matrix& m, int n, int k, int l) {
    return m.block(k * n, l * n, n, n);
}

} // namespace qbdr
