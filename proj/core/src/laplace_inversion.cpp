#include "qbdr/laplace_inversion.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <vector>

namespace qbdr {

Vector invert_laplace(const TransformEvaluator& transform, double t, const InversionConfig& config) {
    if (!(t > 0.0)) throw Error(ErrorCategory::Precondition, "inversion time must be positive");
    if (config.euler_terms < 1 || config.series_terms <= config.euler_terms) {
        throw Error(ErrorCategory::Parameter, "inversion needs series_terms > euler_terms >= 1");
    }
    const int terms = config.series_terms + config.euler_terms;
    const double x = config.a_param / (2.0 * t);
    const double y = std::numbers::pi / t;

    std::vector<CVector> values(static_cast<std::size_t>(terms + 1));
    auto point = [&](int k) { return Complex(x, k * y); };
    if (config.parallel) {
        std::vector<std::future<CVector>> jobs;
        jobs.reserve(values.size());
        for (int k = 0; k <= terms; ++k) {
            jobs.push_back(std::async(std::launch::async, [&, k] { return transform(point(k)); }));
        }
        for (int k = 0; k <= terms; ++k) values[static_cast<std::size_t>(k)] = jobs[static_cast<std::size_t>(k)].get();
    } else {
        for (int k = 0; k <= terms; ++k) values[static_cast<std::size_t>(k)] = transform(point(k));
    }

    const Eigen::Index dim = values[0].size();
    // Partial sums of the alternating series.
    std::vector<Vector> partial(static_cast<std::size_t>(terms + 1));
    Vector sum = 0.5 * values[0].real();
    partial[0] = sum;
    for (int k = 1; k <= terms; ++k) {
        const Vector& term = values[static_cast<std::size_t>(k)].real();
        if (term.size() != dim) throw Error(ErrorCategory::Structural, "transform changed dimension");
        if (k % 2 == 0) sum += term;
        else sum -= term;
        partial[static_cast<std::size_t>(k)] = sum;
    }

    // Binomial average of S_n .. S_{n+m}.
    const int m = config.euler_terms;
    Vector euler = Vector::Zero(dim);
    double weight = std::pow(0.5, m); // C(m,0) / 2^m
    for (int k = 0; k <= m; ++k) {
        euler += weight * partial[static_cast<std::size_t>(config.series_terms + k)];
        weight *= static_cast<double>(m - k) / static_cast<double>(k + 1);
    }
    return std::exp(config.a_param / 2.0) / t * euler;
}

double invert_laplace_scalar(const std::function<Complex(Complex)>& transform, double t,
                             const InversionConfig& config) {
    auto wrapped = [&](Complex s) {
        CVector v(1);
        v(0) = transform(s);
        return v;
    };
    return invert_laplace(wrapped, t, config)(0);
}

} // namespace qbdr
