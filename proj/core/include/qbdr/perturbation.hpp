#pragma once

#include "qbdr/passage_deviation.hpp"

namespace qbdr {

// Capacity ladder: Q^{(c)} = T^{(c)} + E_{c-1} Delta^{(c)}, where
//   T^{(c)} = [[Q^{(c-1)}, 0], [M, C0]],  M = [0 ... 0 A-1],
//   Delta^{(c)} = [0 ... 0  A0 - C0  A1]  (block row c-1 of the update).

struct CapacityLadderState {
    int capacity = 0;
    RowVector pi;
    Matrix dev;
};

struct BlockUpdate {
    int K = 0;  // updated block row
    Matrix P;   // n x n(c+1)
};

BlockUpdate ladder_update(const QbdBlocks& blocks, int capacity);

// T^{(c)} assembled densely (tests and diagnostics).
Matrix t_matrix(const QbdBlocks& blocks, int capacity);

// Group inverse of T^{(c)} from the deviation matrix and stationary vector
// of Q^{(c-1)}.
Matrix t_group_inverse(const Matrix& dev_prev, const RowVector& pi_prev, const QbdBlocks& blocks);

// pi^{(c)} = [pi^{(c-1)}, 0] (I + E Delta T^#)^{-1}, through an n x n solve.
RowVector pi_step(const RowVector& pi_prev, const Matrix& t_sharp, const BlockUpdate& update);

// Deviation matrix of Q + E_K P from the deviation matrix D of Q:
//   (I - 1 pi_new) D (I + E (I - P D E)^{-1} P D).
Matrix deviation_update(const Matrix& dev, const RowVector& pi_new, const BlockUpdate& update);
// Same through the full-size inverse (I - E P D)^{-1}.
Matrix deviation_update_full(const Matrix& dev, const RowVector& pi_new, const BlockUpdate& update);

CapacityLadderState ladder_base(const QbdBlocks& blocks);
CapacityLadderState ladder_step(const QbdBlocks& blocks, const CapacityLadderState& prev);

// D^{(C)} for C = blocks.C.
DeviationResult deviation_recursive(const QbdBlocks& blocks);

struct ResolventResult {
    Matrix resolvent;            // (sI - Q^{(C)})^{-1}
    Matrix deviation_transform;  // (1/s)(sI - Q)^{-1} - (1/s^2) 1 pi
    RowVector pi;
};

ResolventResult resolvent_recursive(const QbdBlocks& blocks, double s);

} // namespace qbdr
