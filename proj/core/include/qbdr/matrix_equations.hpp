#pragma once

#include "qbdr/qbd_model.hpp"

namespace qbdr {

enum class QuadraticAlgorithm { FunctionalIteration, LogarithmicReduction };

struct SolverConfig {
    double tolerance = 1e-12; // entrywise max-norm residual bound
    int max_iterations = 100000;
    QuadraticAlgorithm algorithm = QuadraticAlgorithm::LogarithmicReduction;
};

template <class Scalar>
struct QuadraticSolution {
    MatrixOf<Scalar> X;
    double residual = 0.0;
    int iterations = 0;
};

// Minimal nonnegative solution of  A-1 + (A0 - sI) X + A1 X^2 = 0.
QuadraticSolution<double> solve_g(const QbdBlocks& blocks, double s, const SolverConfig& config = {});
QuadraticSolution<Complex> solve_g(const QbdBlocks& blocks, Complex s, const SolverConfig& config = {});

// Minimal nonnegative solution of  A1 + (A0 - sI) X + A-1 X^2 = 0.
QuadraticSolution<double> solve_ghat(const QbdBlocks& blocks, double s, const SolverConfig& config = {});
QuadraticSolution<Complex> solve_ghat(const QbdBlocks& blocks, Complex s, const SolverConfig& config = {});

// Solver for the generic  lower + (diag - sI) X + upper X^2 = 0 , shared by
// both of the above.
template <class Scalar>
QuadraticSolution<Scalar> solve_quadratic(const Matrix& lower, const Matrix& diag,
                                          const Matrix& upper, Scalar s,
                                          const SolverConfig& config);

// H0(s) = -(A0 - sI + A1 G(s) + A-1 Ghat(s))^{-1}.
// Throws Error{AsymptoticsUndefined} when the inner matrix is singular.
template <class Scalar>
MatrixOf<Scalar> h0(const QbdBlocks& blocks, Scalar s, const MatrixOf<Scalar>& G,
                    const MatrixOf<Scalar>& Ghat);

template <class Scalar>
struct BasicGMatrices {
    Scalar s{};
    MatrixOf<Scalar> G;
    MatrixOf<Scalar> Ghat;
    MatrixOf<Scalar> H0;
    double residual_G = 0.0;
    double residual_Ghat = 0.0;
};

using GMatrices = BasicGMatrices<double>;
using ComplexGMatrices = BasicGMatrices<Complex>;

// G(s), Ghat(s), H0(s) in one go. At s = 0 the drift must not be in the
// null-recurrent band (H0 is undefined there).
GMatrices compute_gmatrices(const QbdBlocks& blocks, double s, const SolverConfig& config = {});
ComplexGMatrices compute_gmatrices(const QbdBlocks& blocks, Complex s,
                                   const SolverConfig& config = {});

struct RateMatrices {
    Matrix R;    // A1 (-(A0 + A1 G))^{-1}
    Matrix Rhat; // A-1 (-(A0 + A-1 Ghat))^{-1}
};

RateMatrices rate_matrices(const QbdBlocks& blocks, const Matrix& G, const Matrix& Ghat);

// Residuals used in the solvers and tests.
template <class Scalar>
double quadratic_residual(const Matrix& lower, const Matrix& diag, const Matrix& upper, Scalar s,
                          const MatrixOf<Scalar>& X);

double spectral_radius(const Matrix& m);

} // namespace qbdr
