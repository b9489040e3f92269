#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qbdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

template <class Scalar>
using MatrixOf = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorOf = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Failure categories. The CLI maps each one to an exit code, so keep the
// list stable.
enum class ErrorCategory {
    Parse,
    Structural,
    Parameter,
    Model,
    IterationLimit,
    NumericalRank,
    Singular,
    TailConvergence,
    AsymptoticsUndefined,
    Precondition,
};

std::string_view to_string(ErrorCategory category) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// Raised by the quadratic matrix equation solvers; carries the residual of
// the last iterate.
class IterationLimitError : public Error {
public:
    IterationLimitError(const std::string& what, double last_residual, int iterations)
        : Error(ErrorCategory::IterationLimit, what),
          last_residual_(last_residual),
          iterations_(iterations) {}

    double last_residual() const noexcept { return last_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double last_residual_;
    int iterations_;
};

inline double max_abs(const auto& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace qbdr
