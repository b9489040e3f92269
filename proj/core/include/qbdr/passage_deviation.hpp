#pragma once

#include <string>
#include <vector>

#include "qbdr/matrix_equations.hpp"
#include "qbdr/stationary.hpp"

namespace qbdr {

// Blocks with the row of `phase` altered so that the target state (level, phase)
// becomes absorbing at rate 1: A-1 and A1 get a zero row, B0, A0 and C0 get
// -e_phase^T.
struct BarredBlocks {
    int phase = 0;
    Matrix A_minus1;
    Matrix A0;
    Matrix A1;
    Matrix B0;
    Matrix C0;
};

BarredBlocks barred_blocks(const QbdBlocks& blocks, int phase);

// mu_k(C) = sum_{j<k} G^j H0 1 + sum_{j=1}^{C-k} Ghat^j H0 1 at s = 0.
Vector mu_k(const QbdBlocks& blocks, const GMatrices& gm, int C, int k);
// mu_0(C) .. mu_C(C) by prefix sums.
std::vector<Vector> mu_all(const QbdBlocks& blocks, const GMatrices& gm, int C);
// Limit C -> infinity; positive recurrent drift only.
Vector mu_unbounded(const QbdBlocks& blocks, const GMatrices& gm, int k);

// Mean first passage times to state (level, phase) from every state,
// m[k](i) = E[time to reach (level, phase) | start in (k, i)].
struct PassageColumn {
    int level = 0;
    int phase = 0;
    std::vector<Vector> m;
};

// gm must be the s = 0 matrices of the same blocks.
PassageColumn passage_column(const QbdBlocks& blocks, int level, int phase, const GMatrices& gm);
std::vector<PassageColumn> passage_columns(const QbdBlocks& blocks, int level, const GMatrices& gm);

// The boundary matrix Z^{(j)} solved by passage_column, and the relative gap
// to the censored absorbing generator times its block factor.
Matrix passage_z_matrix(const QbdBlocks& blocks, int level, int phase, const GMatrices& gm);
double passage_z_factorization_residual(const QbdBlocks& blocks, int level, int phase,
                                        const GMatrices& gm);

// Unrestricted positive recurrent process, levels 0..max_level.
PassageColumn passage_column_unbounded(const QbdBlocks& blocks, int level, int phase,
                                       const GMatrices& gm, int max_level);

// M_{k, level} assembled from the n columns of one target level.
Matrix passage_block(const std::vector<PassageColumn>& columns, int k);

// Stationary block pi_l from the n passage columns of level l, through
// pi_i = 1 / (1 + sum_{x != i} q_{i x} M_{x i}).
RowVector stationary_from_passage(const QbdBlocks& blocks, const std::vector<PassageColumn>& columns);

// Full (C+1)n square matrix of mean first passage times.
Matrix passage_matrix(const QbdBlocks& blocks, const GMatrices& gm);

enum class DeviationMethod { DifferenceEquation, Perturbation, Oracle, LaplaceInversion };

std::string_view to_string(DeviationMethod method) noexcept;

struct DeviationResult {
    Matrix matrix;
    DeviationMethod method = DeviationMethod::DifferenceEquation;
    // Set when only the block column of one level is stored.
    int column_level = -1;
    std::vector<std::string> warnings;
};

// D_{k,l} = [(1 (x) sum_x pi_x M_{x,l}) - M_{k,l}] diag(pi_l), with `columns`
// the n passage columns of level l.
Matrix deviation_block_asymptotic(const StationaryDistribution& pi,
                                  const std::vector<PassageColumn>& columns, int k);

// Block column D_{., level}, shape (C+1)n x n.
DeviationResult deviation_block_column(const QbdBlocks& blocks, int level,
                                       const SolverConfig& config = {});
DeviationResult deviation_block_column(const QbdBlocks& blocks, int level, const GMatrices& gm,
                                       const StationaryDistribution& pi);

// Full asymptotic deviation matrix.
DeviationResult deviation_difference(const QbdBlocks& blocks, const SolverConfig& config = {});

} // namespace qbdr
