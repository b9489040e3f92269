#pragma once

#include <vector>

#include "qbdr/matrix_equations.hpp"

namespace qbdr {

struct StationaryDistribution {
    std::vector<RowVector> pi; // pi_0 .. pi_C
    RowVector v0;
    RowVector vC;

    RowVector stacked() const;
    static StationaryDistribution from_stacked(const RowVector& pi, int n);
};

// pi_k = v0 R^k + vC Rhat^{C-k}, with (v0, vC) the normalized left null
// vector of the 2n x 2n boundary matrix.
StationaryDistribution stationary_rmatrix(const QbdBlocks& blocks, const SolverConfig& config = {});
StationaryDistribution stationary_rmatrix(const QbdBlocks& blocks, const GMatrices& gm);

// The 2n x 2n boundary matrix itself (exposed for the rank property tests).
Matrix stationary_boundary_matrix(const QbdBlocks& blocks, const RateMatrices& rates);

// Stationary distribution of the level-unbounded process, pi_k = pi_0 R^k.
// Positive recurrent drift only.
struct UnboundedStationary {
    RowVector pi0;
    Matrix R;

    RowVector level(int k) const;
};

UnboundedStationary stationary_unbounded(const QbdBlocks& blocks, const GMatrices& gm);

} // namespace qbdr
