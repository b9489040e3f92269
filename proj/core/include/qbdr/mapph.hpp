#pragma once

#include "qbdr/qbd_model.hpp"

namespace qbdr {

// Markovian arrival process.
struct MapParams {
    Matrix D0;
    Matrix D1;
};

// Phase-type service distribution. The exit vector is -T 1.
struct PhParams {
    RowVector tau;
    Matrix T;

    Vector t_exit() const { return -T * Vector::Ones(T.rows()); }
};

// Throws Error{Parameter} listing the first violated condition.
void validate_map(const MapParams& map);
void validate_ph(const PhParams& ph);

// MAP/PH/1/C queue. Phase index = arrival phase * n2 + service phase.
//   A-1 = I (x) (t tau), A0 = D0 (+) T, A1 = D1 (x) I, B0 = D0 (x) I,
//   C0 = (D0 + D1) (+) T
QbdBlocks build_blocks(const MapParams& map, const PhParams& ph, int C);

// Revenue theta per customer lost on arrival at a full queue.
RewardSpec lost_revenue_rewards(const QbdBlocks& blocks, double theta);

// theta per admitted customer plus gamma per customer present per unit time.
RewardSpec gained_revenue_rewards(const QbdBlocks& blocks, double theta, double gamma);

// Renewal MAP with PH(alpha, S) interarrival times: D0 = S, D1 = (-S 1) alpha.
MapParams renewal_map(const PhParams& interarrival);

// Reference example: PH renewal arrivals with alpha = [0.8, 0.2],
// S = [[-10, 2], [1, -6]], and PH(tau, T) services with tau = [0.4, 0.6],
// T = [[-3, 2], [1, -4]]. High blocking.
MapParams example_map();
PhParams example_ph();

// Same two PH laws with the arrival and service roles exchanged. Low blocking.
MapParams swapped_map();
PhParams swapped_ph();

} // namespace qbdr
