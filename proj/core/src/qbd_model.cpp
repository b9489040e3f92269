#include "qbdr/qbd_model.hpp"

#include <cmath>
#include <sstream>

namespace qbdr {

std::string_view to_string(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::Parse: return "parse";
        case ErrorCategory::Structural: return "structural";
        case ErrorCategory::Parameter: return "parameter";
        case ErrorCategory::Model: return "model";
        case ErrorCategory::IterationLimit: return "iteration-limit";
        case ErrorCategory::NumericalRank: return "numerical-rank";
        case ErrorCategory::Singular: return "singular";
        case ErrorCategory::TailConvergence: return "tail-convergence";
        case ErrorCategory::AsymptoticsUndefined: return "asymptotics-undefined";
        case ErrorCategory::Precondition: return "precondition";
    }
    return "unknown";
}

std::string_view to_string(DriftTag tag) noexcept {
    switch (tag) {
        case DriftTag::PositiveRecurrent: return "PositiveRecurrent";
        case DriftTag::Transient: return "Transient";
        case DriftTag::NullRecurrent: return "NullRecurrent";
    }
    return "unknown";
}

QbdBlocks QbdBlocks::with_capacity(int capacity) const {
    QbdBlocks out = *this;
    out.C = capacity;
    return out;
}

RewardSpec RewardSpec::zero(int n, int C) {
    return RewardSpec{std::vector<Vector>(static_cast<std::size_t>(C + 1), Vector::Zero(n))};
}

RewardSpec RewardSpec::constant(int n, int C, double c) {
    return RewardSpec{std::vector<Vector>(static_cast<std::size_t>(C + 1), Vector::Constant(n, c))};
}

Vector RewardSpec::stacked() const {
    if (g.empty()) return {};
    const auto n = g.front().size();
    Vector out(n * static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) out.segment(static_cast<Eigen::Index>(k) * n, n) = g[k];
    return out;
}

std::string ValidationIssue::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Dimension: os << "dimension mismatch in " << block; break;
        case Kind::Negativity: os << "negative rate in " << block; break;
        case Kind::Conservativity: os << "row sum of " << block << " is nonzero"; break;
        case Kind::NonFinite: os << "non-finite entry in " << block; break;
        case Kind::Capacity: os << "invalid size " << block; break;
    }
    if (row >= 0) os << " at row " << row;
    if (col >= 0) os << ", col " << col;
    os << " (magnitude " << magnitude << ")";
    return os.str();
}

namespace {

using Kind = ValidationIssue::Kind;

void check_shape(const Matrix& m, int n, const char* name, ValidationReport& report) {
    if (m.rows() != n || m.cols() != n) {
        report.issues.push_back({Kind::Dimension, name, static_cast<int>(m.rows()),
                                 static_cast<int>(m.cols()), static_cast<double>(n)});
    }
}

void check_entries(const Matrix& m, const char* name, bool diagonal_free,
                   ValidationReport& report) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (!std::isfinite(v)) {
                report.issues.push_back({Kind::NonFinite, name, static_cast<int>(i),
                                         static_cast<int>(j), v});
            } else if (v < 0.0 && !(diagonal_free && i == j)) {
                report.issues.push_back({Kind::Negativity, name, static_cast<int>(i),
                                         static_cast<int>(j), -v});
            }
        }
    }
}

void check_row_sums(std::initializer_list<const Matrix*> parts, const char* name,
                    ValidationReport& report) {
    const Eigen::Index rows = (*parts.begin())->rows();
    for (Eigen::Index i = 0; i < rows; ++i) {
        double sum = 0.0;
        for (const Matrix* p : parts) sum += p->row(i).sum();
        if (std::abs(sum) > kConservativityTolerance) {
            report.issues.push_back({Kind::Conservativity, name, static_cast<int>(i), -1,
                                     std::abs(sum)});
        }
    }
}

} // namespace

ValidationReport validate(const QbdBlocks& b) {
    ValidationReport report;
    if (b.n < 1) report.issues.push_back({Kind::Capacity, "n", -1, -1, static_cast<double>(b.n)});
    if (b.C < 1) report.issues.push_back({Kind::Capacity, "C", -1, -1, static_cast<double>(b.C)});
    if (!report.ok()) return report;

    check_shape(b.A_minus1, b.n, "A_minus1", report);
    check_shape(b.A0, b.n, "A0", report);
    check_shape(b.A1, b.n, "A1", report);
    check_shape(b.B0, b.n, "B0", report);
    check_shape(b.C0, b.n, "C0", report);
    if (!report.ok()) return report;

    check_entries(b.A_minus1, "A_minus1", false, report);
    check_entries(b.A1, "A1", false, report);
    check_entries(b.A0, "A0", true, report);
    check_entries(b.B0, "B0", true, report);
    check_entries(b.C0, "C0", true, report);

    check_row_sums({&b.B0, &b.A1}, "[B0|A1]", report);
    check_row_sums({&b.A_minus1, &b.A0, &b.A1}, "[A_minus1|A0|A1]", report);
    check_row_sums({&b.A_minus1, &b.C0}, "[A_minus1|C0]", report);

    if (report.ok() && !is_irreducible(assemble_generator(b))) {
        report.warnings.push_back("assembled generator is reducible");
    }
    return report;
}

ValidationReport validate(const QbdBlocks& blocks, const RewardSpec& rewards) {
    ValidationReport report = validate(blocks);
    if (static_cast<int>(rewards.g.size()) != blocks.C + 1) {
        report.issues.push_back({Kind::Dimension, "reward", static_cast<int>(rewards.g.size()), -1,
                                 static_cast<double>(blocks.C + 1)});
        return report;
    }
    for (std::size_t k = 0; k < rewards.g.size(); ++k) {
        const Vector& g = rewards.g[k];
        if (g.size() != blocks.n) {
            report.issues.push_back({Kind::Dimension, "reward", static_cast<int>(k), -1,
                                     static_cast<double>(g.size())});
            continue;
        }
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (!std::isfinite(g(i))) {
                report.issues.push_back({Kind::NonFinite, "reward", static_cast<int>(k),
                                         static_cast<int>(i), g(i)});
            }
        }
    }
    return report;
}

Matrix assemble_generator(const QbdBlocks& b) {
    const int n = b.n;
    for (const Matrix* m : {&b.A_minus1, &b.A0, &b.A1, &b.B0, &b.C0}) {
        if (m->rows() != n || m->cols() != n) {
            throw Error(ErrorCategory::Structural, "generator blocks must all be " +
                                                      std::to_string(n) + "x" + std::to_string(n));
        }
    }
    if (b.C < 1) throw Error(ErrorCategory::Structural, "capacity C must be at least 1");

    Matrix Q = Matrix::Zero(b.size(), b.size());
    for (int k = 0; k <= b.C; ++k) {
        auto diag = Q.block(k * n, k * n, n, n);
        if (k == 0) diag = b.B0;
        else if (k == b.C) diag = b.C0;
        else diag = b.A0;
        if (k < b.C) Q.block(k * n, (k + 1) * n, n, n) = b.A1;
        if (k > 0) Q.block(k * n, (k - 1) * n, n, n) = b.A_minus1;
    }
    return Q;
}

bool is_irreducible(const Matrix& generator) {
    const Eigen::Index N = generator.rows();
    if (N <= 1) return true;
    // Forward and backward reachability from state 0.
    auto reach = [&](bool forward) {
        std::vector<char> seen(static_cast<std::size_t>(N), 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const Eigen::Index i = stack.back();
            stack.pop_back();
            for (Eigen::Index j = 0; j < N; ++j) {
                const double rate = forward ? generator(i, j) : generator(j, i);
                if (j != i && rate > 0.0 && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = 1;
                    stack.push_back(j);
                }
            }
        }
        for (char c : seen) {
            if (!c) return false;
        }
        return true;
    };
    return reach(true) && reach(false);
}

DriftClass classify_drift(const QbdBlocks& b, double tolerance) {
    const Matrix A = b.A_minus1 + b.A0 + b.A1;
    if (!is_irreducible(A)) {
        throw Error(ErrorCategory::Model, "phase generator A = A_minus1 + A0 + A1 is reducible");
    }
    const int n = b.n;
    // alpha [A with last column replaced by ones] = e_n
    Matrix M = A;
    M.col(n - 1).setOnes();
    Eigen::FullPivLU<Matrix> lu(M.transpose());
    if (!lu.isInvertible()) {
        throw Error(ErrorCategory::Model, "stationary vector of A is not unique");
    }
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    DriftClass out;
    out.alpha = lu.solve(rhs).transpose();
    const Vector ones = Vector::Ones(n);
    out.mean_drift = (out.alpha * b.A1 * ones)(0) - (out.alpha * b.A_minus1 * ones)(0);
    if (std::abs(out.mean_drift) <= tolerance) out.tag = DriftTag::NullRecurrent;
    else if (out.mean_drift > 0.0) out.tag = DriftTag::Transient;
    else out.tag = DriftTag::PositiveRecurrent;
    return out;
}

} // namespace qbdr
