#include "qbdr/bench.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <map>

#include "qbdr/model_io.hpp"
#include "qbdr/perturbation.hpp"

namespace qbdr {

std::string_view to_string(BenchMethod method) noexcept {
    switch (method) {
        case BenchMethod::DifferenceEq: return "diffeq";
        case BenchMethod::Perturbation: return "perturb";
    }
    return "unknown";
}

std::uint64_t bench_case_seed(std::uint64_t base_seed, int n, int C) {
    return base_seed * 1000003ULL + static_cast<std::uint64_t>(n) * 1009ULL + static_cast<std::uint64_t>(C);
}

double process_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

Matrix last_block_column(const QbdBlocks& b, BenchMethod method) {
    if (method == BenchMethod::DifferenceEq) return deviation_block_column(b, b.C).matrix;
    return deviation_recursive(b).matrix.rightCols(b.n);
}

BenchRecord bench_case(int n, int C, BenchMethod method, int reps, std::uint64_t base_seed,
                       double min_seconds) {
    BenchRecord rec;
    rec.n = n;
    rec.C = C;
    rec.method = method;
    rec.seed = bench_case_seed(base_seed, n, C);
    const QbdBlocks b = random_model(n, C, rec.seed);

    double sink = 0.0;
    const double w0 = process_cpu_seconds();
    sink += last_block_column(b, method)(0, 0);
    const double warm = process_cpu_seconds() - w0;
    if (reps <= 0) {
        reps = warm > 0.0 ? static_cast<int>(std::ceil(min_seconds / warm)) : 1000;
        reps = std::clamp(reps, 1, 1000);
    }
    const double t0 = process_cpu_seconds();
    for (int r = 0; r < reps; ++r) sink += last_block_column(b, method)(0, 0);
    const double elapsed = process_cpu_seconds() - t0;
    if (!std::isfinite(sink)) throw Error(ErrorCategory::NumericalRank, "benchmark produced a non-finite result");
    rec.repetitions = reps;
    rec.mean_cpu_seconds = std::max(elapsed / reps, 1e-9);
    return rec;
}

std::vector<BenchRecord> run_bench(const std::vector<int>& ns, const std::vector<int>& Cs, int reps,
                                   std::uint64_t base_seed, double min_seconds) {
    std::vector<BenchRecord> out;
    for (int n : ns) {
        for (int C : Cs) {
            for (BenchMethod m : {BenchMethod::DifferenceEq, BenchMethod::Perturbation}) {
                out.push_back(bench_case(n, C, m, reps, base_seed, min_seconds));
            }
        }
    }
    return out;
}

double loglog_slope(const std::vector<BenchRecord>& records, int n, BenchMethod method, int min_C) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& r : records) {
        if (r.n != n || r.method != method || r.C < min_C) continue;
        const double x = std::log(static_cast<double>(r.C));
        const double y = std::log(r.mean_cpu_seconds);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) throw Error(ErrorCategory::Parameter, "slope needs at least two capacities");
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

int crossover_capacity(const std::vector<BenchRecord>& records, int n) {
    std::map<int, std::pair<double, double>> by_c;
    for (const auto& r : records) {
        if (r.n != n) continue;
        auto& slot = by_c[r.C];
        (r.method == BenchMethod::DifferenceEq ? slot.first : slot.second) = r.mean_cpu_seconds;
    }
    bool faster_seen = false;
    for (const auto& [C, t] : by_c) {
        if (t.first <= 0.0 || t.second <= 0.0) continue;
        if (t.second < t.first) {
            faster_seen = true;
        } else if (faster_seen) {
            return C;
        }
    }
    return -1;
}

} // namespace qbdr
