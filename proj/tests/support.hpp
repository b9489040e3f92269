#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qbdr/qbdr.hpp"

namespace qbdr::testing {

// Birth-death chain on 0..C with arrival rate lambda and service rate mu.
inline QbdBlocks scalar_model(double lambda, double mu, int C) {
    QbdBlocks b;
    b.n = 1;
    b.C = C;
    b.A_minus1 = Matrix::Constant(1, 1, mu);
    b.A0 = Matrix::Constant(1, 1, -lambda - mu);
    b.A1 = Matrix::Constant(1, 1, lambda);
    b.B0 = Matrix::Constant(1, 1, -lambda);
    b.C0 = Matrix::Constant(1, 1, -mu);
    return b;
}

inline QbdBlocks example_model(int C) { return build_blocks(example_map(), example_ph(), C); }
inline QbdBlocks swapped_model(int C) { return build_blocks(swapped_map(), swapped_ph(), C); }

template <class V>
Vector stack(const std::vector<V>& parts) {
    Eigen::Index total = 0;
    for (const auto& p : parts) total += p.size();
    Vector out(total);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.segment(at, p.size()) = p.real();
        at += p.size();
    }
    return out;
}

inline CVector stack_complex(const std::vector<CVector>& parts) {
    Eigen::Index total = 0;
    for (const auto& p : parts) total += p.size();
    CVector out(total);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.segment(at, p.size()) = p;
        at += p.size();
    }
    return out;
}

// Random irreducible models with n in 1..max_n and C in 1..max_C.
inline std::vector<QbdBlocks> random_pool(int count, int max_n, int max_C, std::uint64_t seed) {
    std::vector<QbdBlocks> out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_n(1, max_n);
    std::uniform_int_distribution<int> pick_C(1, max_C);
    for (int i = 0; i < count; ++i) {
        const int n = pick_n(rng);
        const int C = pick_C(rng);
        out.push_back(random_model(n, C, rng()));
    }
    return out;
}

// Dense deviation matrix through the oracle.
inline Matrix dense_deviation(const QbdBlocks& b) {
    const Matrix Q = assemble_generator(b);
    return oracle::deviation(Q, oracle::stationary(Q));
}

// max |QD - (1 pi - I)|, |pi D|, |D 1|.
inline double identity_residual(const Matrix& Q, const RowVector& pi, const Matrix& D) {
    const Eigen::Index N = Q.rows();
    const Matrix W = Vector::Ones(N) * pi;
    const double r1 = max_abs(Q * D - (W - Matrix::Identity(N, N)));
    const double r2 = max_abs(pi * D);
    const double r3 = max_abs(D * Vector::Ones(N));
    return std::max({r1, r2, r3});
}

} // namespace qbdr::testing
