#pragma once

#include <vector>

#include "qbdr/types.hpp"

namespace qbdr {

Matrix kron(const Matrix& a, const Matrix& b);

// a (+) b = a (x) I + I (x) b
Matrix kron_sum(const Matrix& a, const Matrix& b);

// Schur complement of a generator-like matrix onto the index set `keep`:
//   M_kk + M_kd (-M_dd)^{-1} M_dk
Matrix censor(const Matrix& m, const std::vector<Eigen::Index>& keep);

// Indices of the phases of the given levels, in level order.
std::vector<Eigen::Index> level_indices(int n, const std::vector<int>& levels);

template <class Scalar>
MatrixOf<Scalar> matrix_power(const MatrixOf<Scalar>& m, int k) {
    MatrixOf<Scalar> out = MatrixOf<Scalar>::Identity(m.rows(), m.cols());
    MatrixOf<Scalar> base = m;
    while (k > 0) {
        if (k & 1) out = out * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return out;
}

// Relative Frobenius gap ||a - b||_F / max(||b||_F, tiny).
double relative_frobenius(const Matrix& a, const Matrix& b);

} // namespace qbdr
