#pragma once

#include <cstdint>
#include <vector>

#include "qbdr/passage_deviation.hpp"

namespace qbdr {

enum class BenchMethod { DifferenceEq, Perturbation };
std::string_view to_string(BenchMethod method) noexcept;

struct BenchRecord {
    int n = 0;
    int C = 0;
    BenchMethod method = BenchMethod::DifferenceEq;
    double mean_cpu_seconds = 0.0;
    int repetitions = 0;
    std::uint64_t seed = 0;
};

// Seed of the random model for one (n, C) case.
std::uint64_t bench_case_seed(std::uint64_t base_seed, int n, int C);

// Process CPU time in seconds.
double process_cpu_seconds();

// Last block column of the deviation matrix by the chosen method.
Matrix last_block_column(const QbdBlocks& blocks, BenchMethod method);

// One warm-up run, then the mean CPU time over `reps` timed runs. A rep
// count of 0 picks enough repetitions to fill about `min_seconds`.
BenchRecord bench_case(int n, int C, BenchMethod method, int reps, std::uint64_t base_seed,
                       double min_seconds = 0.05);

std::vector<BenchRecord> run_bench(const std::vector<int>& ns, const std::vector<int>& Cs, int reps,
                                   std::uint64_t base_seed, double min_seconds = 0.05);

// Least-squares slope of log(time) against log(C) over records with
// C >= min_C.
double loglog_slope(const std::vector<BenchRecord>& records, int n, BenchMethod method, int min_C);

// Smallest C where the perturbation method is at least as slow as the
// difference-equation method, after a C where it was faster; -1 if absent.
int crossover_capacity(const std::vector<BenchRecord>& records, int n);

} // namespace qbdr
