#include "qbdr/linalg.hpp"

#include <algorithm>
#include <limits>

namespace qbdr {

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix kron_sum(const Matrix& a, const Matrix& b) {
    return kron(a, Matrix::Identity(b.rows(), b.cols())) +
           kron(Matrix::Identity(a.rows(), a.cols()), b);
}

Matrix censor(const Matrix& m, const std::vector<Eigen::Index>& keep) {
    const Eigen::Index N = m.rows();
    std::vector<char> kept(static_cast<std::size_t>(N), 0);
    for (auto i : keep) kept[static_cast<std::size_t>(i)] = 1;
    std::vector<Eigen::Index> drop;
    for (Eigen::Index i = 0; i < N; ++i) {
        if (!kept[static_cast<std::size_t>(i)]) drop.push_back(i);
    }
    const Matrix kk = m(keep, keep);
    if (drop.empty()) return kk;
    const Matrix dd = m(drop, drop);
    const Matrix kd = m(keep, drop);
    const Matrix dk = m(drop, keep);
    return kk + kd * (-dd).partialPivLu().solve(dk);
}

std::vector<Eigen::Index> level_indices(int n, const std::vector<int>& levels) {
    std::vector<Eigen::Index> out;
    out.reserve(levels.size() * static_cast<std::size_t>(n));
    for (int level : levels) {
        for (int i = 0; i < n; ++i) out.push_back(static_cast<Eigen::Index>(level) * n + i);
    }
    return out;
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
    const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
    return (a - b).norm() / denom;
}

} // namespace qbdr
