#pragma once

#include "qbdr/types.hpp"

namespace qbdr::oracle {

// Dense reference computations on an assembled generator. None of them use
// the level structure.

struct OracleConfig {
    // Simpson panel width, divided by max(1, ||Q||_max).
    double quadrature_step = 1e-3;
    // RK4 step, divided by max(1, ||Q||_max).
    double ode_step = 1e-3;
    // Scaling-and-squaring Pade exponential; the only method provided.
    enum class Expm { PadeScalingSquaring } expm_method = Expm::PadeScalingSquaring;
    int max_states = 2000;
};

RowVector stationary(const Matrix& Q, const OracleConfig& config = {});

// D = (1 pi - Q)^{-1} - 1 pi, checked against QD = 1 pi - I, pi D = 0, D 1 = 0.
Matrix deviation(const Matrix& Q, const RowVector& pi, const OracleConfig& config = {});

// D(t) = int_0^t (exp(Qu) - 1 pi) du by composite Simpson.
Matrix transient_deviation(const Matrix& Q, const RowVector& pi, double t,
                           const OracleConfig& config = {});

// Closed form D - exp(Qt) D, for cross-checks of the quadrature.
Matrix transient_deviation_closed(const Matrix& Q, const Matrix& D, double t);

// R(t) with R' = QR + g, R(0) = 0, by classical RK4.
Vector reward(const Matrix& Q, const Vector& g, double t, const OracleConfig& config = {});

// (pi g) 1 t + D(t) g.
Vector reward_from_deviation(const RowVector& pi, const Matrix& Dt, const Vector& g, double t);

// Mean first passage times to `target` by a taboo solve; entry `target` is 0.
Vector passage(const Matrix& Q, Eigen::Index target, const OracleConfig& config = {});

// (sI - Q)^{-1}.
Matrix resolvent(const Matrix& Q, double s, const OracleConfig& config = {});

Matrix expm(const Matrix& A);

} // namespace qbdr::oracle
