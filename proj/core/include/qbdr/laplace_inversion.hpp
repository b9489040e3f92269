#pragma once

#include <functional>

#include "qbdr/types.hpp"

namespace qbdr {

// Euler-summation Fourier-series inversion. The Bromwich contour sits at
// Re(s) = a_param / (2t); partial sums S_series .. S_{series+euler} of the
// alternating series are binomially averaged.
struct InversionConfig {
    double a_param = 18.4;
    int series_terms = 40;
    int euler_terms = 12;
    // Evaluate the transform points on worker threads. Summation order is
    // fixed, so the result does not depend on this flag.
    bool parallel = false;
};

// Maps a complex s with Re(s) > 0 to the transform of a real vector-valued
// function.
using TransformEvaluator = std::function<CVector(Complex)>;

Vector invert_laplace(const TransformEvaluator& transform, double t,
                      const InversionConfig& config = {});

// Scalar convenience wrapper.
double invert_laplace_scalar(const std::function<Complex(Complex)>& transform, double t,
                             const InversionConfig& config = {});

} // namespace qbdr
