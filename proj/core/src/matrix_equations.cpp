#include "qbdr/matrix_equations.hpp"

#include <cmath>
#include <limits>

namespace qbdr {

namespace {

template <class Scalar>
MatrixOf<Scalar> shifted(const Matrix& diag, Scalar s) {
    MatrixOf<Scalar> m = diag.cast<Scalar>();
    m.diagonal().array() -= s;
    return m;
}

template <class Scalar>
void require_invertible(const Eigen::PartialPivLU<MatrixOf<Scalar>>& lu, ErrorCategory category,
                        const char* what) {
    const double rc = lu.rcond();
    if (!(rc > 1e3 * std::numeric_limits<double>::epsilon())) {
        throw Error(category, std::string(what) + " is numerically singular (rcond " +
                                  std::to_string(rc) + ")");
    }
}

template <class Scalar>
QuadraticSolution<Scalar> logarithmic_reduction(const Matrix& lower, const Matrix& diag,
                                                const Matrix& upper, Scalar s,
                                                const SolverConfig& config) {
    using Mat = MatrixOf<Scalar>;
    const Eigen::Index n = diag.rows();
    const Mat I = Mat::Identity(n, n);

    Eigen::PartialPivLU<Mat> lu0(-shifted(diag, s));
    require_invertible(lu0, ErrorCategory::Singular, "A0 - sI");
    Mat down = lu0.solve(lower.cast<Scalar>());
    Mat up = lu0.solve(upper.cast<Scalar>());

    QuadraticSolution<Scalar> out;
    out.X = down;
    Mat T = up;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int it = 1; it <= config.max_iterations; ++it) {
        out.iterations = it;
        const Mat U = down * up + up * down;
        Eigen::PartialPivLU<Mat> lu(I - U);
        const Mat down2 = down * down;
        const Mat up2 = up * up;
        down = lu.solve(down2);
        up = lu.solve(up2);
        const Mat correction = T * down;
        out.X += correction;
        T = T * up;

        const double scale = std::max(1.0, max_abs(out.X));
        if (max_abs(correction) <= eps * scale || max_abs(T) <= eps) {
            out.residual = quadratic_residual(lower, diag, upper, s, out.X);
            if (out.residual <= config.tolerance) return out;
            // Corrections vanished but the residual did not: stagnation.
            if (max_abs(correction) == 0.0 || it > 200) break;
        }
    }
    out.residual = quadratic_residual(lower, diag, upper, s, out.X);
    if (out.residual <= config.tolerance) return out;
    throw IterationLimitError("logarithmic reduction did not reach the residual bound (residual " +
                                  std::to_string(out.residual) + ")",
                              out.residual, out.iterations);
}

template <class Scalar>
QuadraticSolution<Scalar> functional_iteration(const Matrix& lower, const Matrix& diag,
                                               const Matrix& upper, Scalar s,
                                               const SolverConfig& config) {
    using Mat = MatrixOf<Scalar>;
    const Eigen::Index n = diag.rows();
    // X <- (sI - A0)^{-1} (lower + upper X^2), from X = 0.
    Eigen::PartialPivLU<Mat> lu(-shifted(diag, s));
    require_invertible(lu, ErrorCategory::Singular, "A0 - sI");
    const Mat low = lu.solve(lower.cast<Scalar>());
    const Mat upp = lu.solve(upper.cast<Scalar>());

    QuadraticSolution<Scalar> out;
    out.X = Mat::Zero(n, n);
    double prev_step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= config.max_iterations; ++it) {
        out.iterations = it;
        Mat next = low + upp * (out.X * out.X);
        const double step = max_abs(next - out.X);
        out.X = std::move(next);
        // Linear convergence: remaining error is about step * r / (1 - r).
        const double ratio = prev_step > 0.0 ? step / prev_step : 0.0;
        prev_step = step;
        const double tail = ratio < 1.0 ? step * ratio / (1.0 - ratio) : step;
        if (tail <= 0.5 * config.tolerance) {
            out.residual = quadratic_residual(lower, diag, upper, s, out.X);
            if (out.residual <= config.tolerance) return out;
        }
    }
    out.residual = quadratic_residual(lower, diag, upper, s, out.X);
    throw IterationLimitError("functional iteration hit the iteration limit (residual " +
                                  std::to_string(out.residual) + ")",
                              out.residual, out.iterations);
}

} // namespace

template <class Scalar>
double quadratic_residual(const Matrix& lower, const Matrix& diag, const Matrix& upper, Scalar s,
                          const MatrixOf<Scalar>& X) {
    const MatrixOf<Scalar> r =
        lower.cast<Scalar>() + shifted(diag, s) * X + upper.cast<Scalar>() * (X * X);
    return max_abs(r);
}

template <class Scalar>
QuadraticSolution<Scalar> solve_quadratic(const Matrix& lower, const Matrix& diag,
                                          const Matrix& upper, Scalar s,
                                          const SolverConfig& config) {
    if (!(config.tolerance > 0.0) || config.max_iterations < 1) {
        throw Error(ErrorCategory::Parameter, "solver tolerance must be > 0 and max_iterations >= 1");
    }
    if (std::real(s) < 0.0) {
        throw Error(ErrorCategory::Precondition, "transform variable must have Re(s) >= 0");
    }
    switch (config.algorithm) {
        case QuadraticAlgorithm::FunctionalIteration:
            return functional_iteration(lower, diag, upper, s, config);
        case QuadraticAlgorithm::LogarithmicReduction:
            break;
    }
    return logarithmic_reduction(lower, diag, upper, s, config);
}

QuadraticSolution<double> solve_g(const QbdBlocks& b, double s, const SolverConfig& config) {
    return solve_quadratic(b.A_minus1, b.A0, b.A1, s, config);
}
QuadraticSolution<Complex> solve_g(const QbdBlocks& b, Complex s, const SolverConfig& config) {
    return solve_quadratic(b.A_minus1, b.A0, b.A1, s, config);
}
QuadraticSolution<double> solve_ghat(const QbdBlocks& b, double s, const SolverConfig& config) {
    return solve_quadratic(b.A1, b.A0, b.A_minus1, s, config);
}
QuadraticSolution<Complex> solve_ghat(const QbdBlocks& b, Complex s, const SolverConfig& config) {
    return solve_quadratic(b.A1, b.A0, b.A_minus1, s, config);
}

template <class Scalar>
MatrixOf<Scalar> h0(const QbdBlocks& b, Scalar s, const MatrixOf<Scalar>& G,
                    const MatrixOf<Scalar>& Ghat) {
    const MatrixOf<Scalar> inner =
        shifted(b.A0, s) + b.A1.cast<Scalar>() * G + b.A_minus1.cast<Scalar>() * Ghat;
    Eigen::PartialPivLU<MatrixOf<Scalar>> lu(inner);
    require_invertible(lu, ErrorCategory::AsymptoticsUndefined,
                       "A0 - sI + A1 G(s) + A-1 Ghat(s) (null-recurrent at s = 0?)");
    return -lu.inverse();
}

namespace {

template <class Scalar>
BasicGMatrices<Scalar> gmatrices_impl(const QbdBlocks& b, Scalar s, const SolverConfig& config) {
    BasicGMatrices<Scalar> out;
    out.s = s;
    auto g = solve_g(b, s, config);
    auto gh = solve_ghat(b, s, config);
    out.G = std::move(g.X);
    out.Ghat = std::move(gh.X);
    out.residual_G = g.residual;
    out.residual_Ghat = gh.residual;
    out.H0 = h0<Scalar>(b, s, out.G, out.Ghat);
    return out;
}

void require_not_null_recurrent(const QbdBlocks& b) {
    DriftClass drift;
    try {
        drift = classify_drift(b);
    } catch (const Error&) {
        return; // reducible A: no drift band to test, rely on the rcond guards
    }
    if (drift.tag == DriftTag::NullRecurrent) {
        throw Error(ErrorCategory::AsymptoticsUndefined,
                    "asymptotic quantities are undefined for a null-recurrent QBD");
    }
}

} // namespace

GMatrices compute_gmatrices(const QbdBlocks& b, double s, const SolverConfig& config) {
    if (s != 0.0) return gmatrices_impl(b, s, config);
    require_not_null_recurrent(b);
    GMatrices out = gmatrices_impl(b, s, config);
    // Restore exact stochasticity of the recurrent-side matrix.
    DriftTag tag;
    try {
        tag = classify_drift(b).tag;
    } catch (const Error&) {
        return out;
    }
    Matrix& X = tag == DriftTag::PositiveRecurrent ? out.G : out.Ghat;
    const Vector rows = X.rowwise().sum();
    if ((rows.array() > 0.0).all() && max_abs(rows - Vector::Ones(b.n)) < 1e3 * config.tolerance) {
        X = rows.cwiseInverse().asDiagonal() * X;
        out.H0 = h0<double>(b, s, out.G, out.Ghat);
    }
    return out;
}

ComplexGMatrices compute_gmatrices(const QbdBlocks& b, Complex s, const SolverConfig& config) {
    return gmatrices_impl(b, s, config);
}

RateMatrices rate_matrices(const QbdBlocks& b, const Matrix& G, const Matrix& Ghat) {
    require_not_null_recurrent(b);
    // X M^{-1} = (M^{-T} X^T)^T
    Eigen::PartialPivLU<Matrix> up(-(b.A0 + b.A1 * G).transpose());
    require_invertible(up, ErrorCategory::AsymptoticsUndefined, "A0 + A1 G");
    Eigen::PartialPivLU<Matrix> down(-(b.A0 + b.A_minus1 * Ghat).transpose());
    require_invertible(down, ErrorCategory::AsymptoticsUndefined, "A0 + A-1 Ghat");
    RateMatrices out;
    out.R = up.solve(b.A1.transpose()).transpose();
    out.Rhat = down.solve(b.A_minus1.transpose()).transpose();
    return out;
}

double spectral_radius(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

template QuadraticSolution<double> solve_quadratic(const Matrix&, const Matrix&, const Matrix&,
                                                   double, const SolverConfig&);
template QuadraticSolution<Complex> solve_quadratic(const Matrix&, const Matrix&, const Matrix&,
                                                    Complex, const SolverConfig&);
template Matrix h0(const QbdBlocks&, double, const Matrix&, const Matrix&);
template CMatrix h0(const QbdBlocks&, Complex, const CMatrix&, const CMatrix&);
template double quadratic_residual(const Matrix&, const Matrix&, const Matrix&, double,
                                   const Matrix&);
template double quadratic_residual(const Matrix&, const Matrix&, const Matrix&, Complex,
                                   const CMatrix&);

} // namespace qbdr
