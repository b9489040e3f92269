#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbdr/qbdr.hpp"

namespace {

using namespace qbdr;

// CSV sink: stdout or a file, '.' decimals regardless of locale.
class Csv {
public:
    explicit Csv(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw Error(ErrorCategory::Parse, "cannot open output file " + path);
        }
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }
    void header(const std::string& h) { out() << h << '\n'; }
    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((out() << (first ? "" : ",") << cell(fields), first = false), ...);
        out() << '\n';
    }

private:
    static std::string cell(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(std::uint64_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(std::string_view v) { return std::string(v); }
    static std::string cell(const char* v) { return v; }

    std::unique_ptr<std::ofstream> file_;
};

int exit_code(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Parse:
        case ErrorCategory::Structural:
        case ErrorCategory::Parameter: return 2;
        case ErrorCategory::Model:
        case ErrorCategory::AsymptoticsUndefined:
        case ErrorCategory::Precondition: return 4;
        case ErrorCategory::IterationLimit:
        case ErrorCategory::NumericalRank:
        case ErrorCategory::Singular:
        case ErrorCategory::TailConvergence: return 3;
    }
    return 3;
}

[[noreturn]] void bad_arg(const std::string& what) { throw Error(ErrorCategory::Parameter, what); }

ModelFile load_checked(const std::string& path) {
    ModelFile m = load_model(path);
    const auto report = m.reward ? validate(m.blocks, *m.reward) : validate(m.blocks);
    if (!report.ok()) throw Error(ErrorCategory::Structural, report.issues.front().describe());
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    return m;
}

std::vector<double> split_numbers(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    ss.imbue(std::locale::classic());
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::istringstream is(item);
        is.imbue(std::locale::classic());
        double v = 0.0;
        if (!(is >> v) || !(is >> std::ws).eof()) bad_arg("cannot read number \"" + item + "\"");
        out.push_back(v);
    }
    return out;
}

std::vector<double> time_grid(const std::optional<double>& t, const std::string& grid) {
    std::vector<double> out;
    if (!grid.empty()) {
        const auto p = split_numbers(grid, ':');
        if (p.size() != 3 || !(p[2] > 0.0) || p[1] < p[0]) bad_arg("--t-grid expects a:b:step with a <= b, step > 0");
        const auto count = static_cast<long>(std::floor((p[1] - p[0]) / p[2] + 1e-9));
        for (long i = 0; i <= count; ++i) out.push_back(p[0] + static_cast<double>(i) * p[2]);
    } else if (t) {
        out.push_back(*t);
    } else {
        bad_arg("one of --t or --t-grid is required");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] >= 0.0)) bad_arg("times must be >= 0");
        if (i > 0 && !(out[i] > out[i - 1])) bad_arg("time grid must be strictly increasing");
    }
    return out;
}

std::vector<int> int_range(const std::string& text, const char* flag) {
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        const auto p = split_numbers(text, ':');
        if (p.size() < 2 || p.size() > 3) bad_arg(std::string(flag) + " expects a:b or a:b:step");
        const int step = p.size() == 3 ? static_cast<int>(p[2]) : 1;
        if (step < 1 || p[1] < p[0]) bad_arg(std::string(flag) + " has an empty range");
        for (int v = static_cast<int>(p[0]); v <= static_cast<int>(p[1]); v += step) out.push_back(v);
    } else {
        for (double v : split_numbers(text, ',')) out.push_back(static_cast<int>(v));
    }
    for (int v : out) {
        if (v < 1) bad_arg(std::string(flag) + " values must be >= 1");
    }
    return out;
}

std::pair<int, int> block_pair(const std::string& text, int C) {
    const auto p = split_numbers(text, ',');
    if (p.size() != 2) bad_arg("--block expects K,L");
    const int k = static_cast<int>(p[0]);
    const int l = static_cast<int>(p[1]);
    if (k < 0 || l < 0 || k > C || l > C) bad_arg("--block levels must lie in 0..C");
    return {k, l};
}

int phase_index(int phase, int n) {
    if (phase < 1 || phase > n) bad_arg("--phase must lie in 1..n");
    return phase - 1;
}

void level_in_range(int level, int C) {
    if (level < 0 || level > C) bad_arg("--level must lie in 0..C");
}

void write_matrix(Csv& csv, const Matrix& M, int n, int row_level0, int col_level0) {
    csv.header("from_level,from_phase,to_level,to_phase,value");
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            csv.row(row_level0 + static_cast<int>(i / n), static_cast<int>(i % n) + 1,
                    col_level0 + static_cast<int>(j / n), static_cast<int>(j % n) + 1, M(i, j));
        }
    }
}

struct Options {
    std::string model;
    std::string method;
    double s = 0.0;
    std::optional<double> t;
    std::string t_grid;
    std::optional<int> level;
    std::optional<int> phase;
    std::string block;
    std::optional<double> theta;
    std::optional<double> gamma;
    std::uint64_t seed = 1;
    std::string output;
    int reps = 10;
    std::string n_range = "2:5";
    std::string c_range = "5,6,8,10,15,20,30,40,60,80,100";
    std::string phase_dist;
    bool parallel = false;
};

int cmd_validate(const Options& o) {
    const ModelFile m = load_model(o.model);
    const auto report = m.reward ? validate(m.blocks, *m.reward) : validate(m.blocks);
    Csv csv(o.output);
    csv.header("kind,block,row,col,magnitude,description");
    for (const auto& issue : report.issues) {
        static const char* kinds[] = {"dimension", "negativity", "conservativity", "non-finite", "capacity"};
        csv.row(kinds[static_cast<int>(issue.kind)], issue.block, issue.row, issue.col, issue.magnitude,
                issue.describe());
    }
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    if (!report.ok()) {
        std::cerr << "error: category=structural message=" << report.issues.size() << " validation issue(s)\n";
        return 2;
    }
    return 0;
}

int cmd_stationary(const Options& o) {
    const ModelFile m = load_checked(o.model);
    const std::string method = o.method.empty() ? "rmatrix" : o.method;
    RowVector pi;
    if (method == "rmatrix") {
        pi = stationary_rmatrix(m.blocks).stacked();
    } else if (method == "oracle") {
        pi = oracle::stationary(assemble_generator(m.blocks));
    } else {
        bad_arg("stationary --method must be rmatrix or oracle");
    }
    Csv csv(o.output);
    csv.header("level,phase,probability");
    const int n = m.blocks.n;
    for (Eigen::Index i = 0; i < pi.size(); ++i) csv.row(static_cast<int>(i / n), static_cast<int>(i % n) + 1, pi(i));
    return 0;
}

int cmd_gmatrix(const Options& o) {
    const ModelFile m = load_checked(o.model);
    if (!(o.s >= 0.0)) bad_arg("--s must be >= 0");
    const GMatrices gm = compute_gmatrices(m.blocks, o.s);
    Csv csv(o.output);
    csv.header("matrix,row,col,value");
    const std::pair<const char*, const Matrix*> mats[] = {{"G", &gm.G}, {"Ghat", &gm.Ghat}, {"H0", &gm.H0}};
    for (const auto& [name, M] : mats) {
        for (Eigen::Index i = 0; i < M->rows(); ++i) {
            for (Eigen::Index j = 0; j < M->cols(); ++j) {
                csv.row(name, static_cast<int>(i) + 1, static_cast<int>(j) + 1, (*M)(i, j));
            }
        }
    }
    return 0;
}

RowVector initial_phase_distribution(const Options& o, int n) {
    if (!o.phase_dist.empty()) {
        const auto p = split_numbers(o.phase_dist, ',');
        if (static_cast<int>(p.size()) != n) bad_arg("--phase-dist needs n entries");
        RowVector out(n);
        for (int i = 0; i < n; ++i) {
            if (p[i] < 0.0) bad_arg("--phase-dist entries must be >= 0");
            out(i) = p[i];
        }
        if (std::abs(out.sum() - 1.0) > 1e-9) bad_arg("--phase-dist must sum to 1");
        return out;
    }
    if (o.phase) {
        RowVector out = RowVector::Zero(n);
        out(phase_index(*o.phase, n)) = 1.0;
        return out;
    }
    return RowVector::Constant(n, 1.0 / n);
}

int cmd_reward(const Options& o) {
    const ModelFile m = load_checked(o.model);
    const QbdBlocks& b = m.blocks;
    RewardSpec r;
    if (o.theta) {
        r = o.gamma ? gained_revenue_rewards(b, *o.theta, *o.gamma) : lost_revenue_rewards(b, *o.theta);
    } else if (m.reward) {
        r = *m.reward;
    } else {
        bad_arg("reward rates missing: add \"reward\" to the model file or pass --theta");
    }
    const auto times = time_grid(o.t, o.t_grid);
    const RowVector w = initial_phase_distribution(o, b.n);
    if (o.level) level_in_range(*o.level, b.C);
    TimeDomainConfig cfg;
    cfg.inversion.parallel = o.parallel;

    Csv csv(o.output);
    csv.header("t,level,value");
    for (double t : times) {
        const auto R = reward_time(b, r, t, cfg);
        for (int k = 0; k <= b.C; ++k) {
            if (o.level && k != *o.level) continue;
            csv.row(t, k, (w * R[k])(0));
        }
    }
    return 0;
}

int cmd_deviation(const Options& o) {
    const ModelFile m = load_checked(o.model);
    const QbdBlocks& b = m.blocks;
    const std::string method = o.method.empty() ? "diffeq" : o.method;
    if (method != "diffeq" && method != "perturb" && method != "oracle" && method != "inversion") {
        bad_arg("deviation --method must be diffeq, perturb, oracle or inversion");
    }
    std::optional<std::pair<int, int>> blk;
    if (!o.block.empty()) blk = block_pair(o.block, b.C);
    const int n = b.n;

    Matrix out;
    if (o.t || !o.t_grid.empty()) {
        if (!o.t_grid.empty()) bad_arg("deviation takes a single --t");
        if (!(*o.t >= 0.0)) bad_arg("--t must be >= 0");
        const auto st = stationary_rmatrix(b);
        if (method == "oracle") {
            const Matrix Q = assemble_generator(b);
            out = oracle::transient_deviation(Q, st.stacked(), *o.t);
            if (blk) out = level_block(out, n, blk->first, blk->second);
        } else if (blk) {
            out = transient_deviation_block(b, st, *o.t, blk->first, blk->second);
        } else {
            out = transient_deviation(b, st, *o.t);
        }
    } else {
        if (method == "inversion") throw Error(ErrorCategory::Precondition, "method inversion needs --t");
        if (method == "diffeq") {
            if (blk) {
                out = deviation_block_column(b, blk->second).matrix.middleRows(blk->first * n, n);
            } else {
                out = deviation_difference(b).matrix;
            }
        } else {
            if (method == "perturb") {
                out = deviation_recursive(b).matrix;
            } else {
                const Matrix Q = assemble_generator(b);
                out = oracle::deviation(Q, oracle::stationary(Q));
            }
            if (blk) out = level_block(out, n, blk->first, blk->second);
        }
    }
    Csv csv(o.output);
    write_matrix(csv, out, n, blk ? blk->first : 0, blk ? blk->second : 0);
    return 0;
}

int cmd_passage(const Options& o) {
    const ModelFile m = load_checked(o.model);
    const QbdBlocks& b = m.blocks;
    if (!o.level) bad_arg("passage needs --level");
    level_in_range(*o.level, b.C);
    const GMatrices gm = compute_gmatrices(b, 0.0);
    std::vector<PassageColumn> cols;
    if (o.phase) {
        cols.push_back(passage_column(b, *o.level, phase_index(*o.phase, b.n), gm));
    } else {
        cols = passage_columns(b, *o.level, gm);
    }
    Csv csv(o.output);
    csv.header("from_level,from_phase,to_level,to_phase,mean_time");
    for (const auto& c : cols) {
        for (int k = 0; k <= b.C; ++k) {
            for (int i = 0; i < b.n; ++i) csv.row(k, i + 1, c.level, c.phase + 1, c.m[k](i));
        }
    }
    return 0;
}

int cmd_bench(const Options& o) {
    if (o.reps < 1) bad_arg("--reps must be >= 1");
    const auto ns = int_range(o.n_range, "--n-range");
    const auto Cs = int_range(o.c_range, "--c-range");
    Csv csv(o.output);
    csv.header("n,C,method,mean_cpu_seconds,reps,seed");
    for (int n : ns) {
        for (int C : Cs) {
            for (BenchMethod method : {BenchMethod::DifferenceEq, BenchMethod::Perturbation}) {
                const BenchRecord r = bench_case(n, C, method, o.reps, o.seed);
                csv.row(r.n, r.C, to_string(r.method), r.mean_cpu_seconds, r.repetitions, r.seed);
            }
        }
    }
    return 0;
}

int cmd_mapph_build(const Options& o) {
    const MapPhFile p = load_mapph(o.model);
    ModelFile m;
    m.blocks = build_blocks(p.map, p.ph, p.C);
    if (o.theta) {
        m.reward = o.gamma ? gained_revenue_rewards(m.blocks, *o.theta, *o.gamma)
                           : lost_revenue_rewards(m.blocks, *o.theta);
    }
    Csv csv(o.output);
    csv.out() << dump_model(m);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite level-dependent QBD analysis: rewards, deviation matrices, passage times"};
    app.require_subcommand(1);
    Options o;

    auto add_model = [&](CLI::App* sub, const char* what = "Model file (JSON)") {
        sub->add_option("--model", o.model, what)->required();
    };
    auto add_output = [&](CLI::App* sub) { sub->add_option("--output", o.output, "Write CSV to this file"); };

    auto* validate_cmd = app.add_subcommand("validate", "Check a model file");
    add_model(validate_cmd);
    add_output(validate_cmd);

    auto* stationary_cmd = app.add_subcommand("stationary", "Stationary distribution");
    add_model(stationary_cmd);
    stationary_cmd->add_option("--method", o.method, "rmatrix (default) or oracle");
    add_output(stationary_cmd);

    auto* gmatrix_cmd = app.add_subcommand("gmatrix", "G(s), Ghat(s) and H0(s)");
    add_model(gmatrix_cmd);
    gmatrix_cmd->add_option("--s", o.s, "Transform variable (default 0)");
    add_output(gmatrix_cmd);

    auto* reward_cmd = app.add_subcommand("reward", "Expected cumulative reward up to time t");
    add_model(reward_cmd);
    reward_cmd->add_option("--t", o.t, "Single time");
    reward_cmd->add_option("--t-grid", o.t_grid, "Time grid a:b:step");
    reward_cmd->add_option("--level", o.level, "Report one initial level only");
    reward_cmd->add_option("--phase", o.phase, "Start in this phase (1-based)");
    reward_cmd->add_option("--phase-dist", o.phase_dist, "Initial phase distribution, comma separated");
    reward_cmd->add_option("--theta", o.theta, "Revenue per lost (or, with --gamma, admitted) customer");
    reward_cmd->add_option("--gamma", o.gamma, "Revenue per customer present per unit time");
    reward_cmd->add_flag("--parallel", o.parallel, "Evaluate transform points on worker threads");
    add_output(reward_cmd);

    auto* deviation_cmd = app.add_subcommand("deviation", "Deviation matrix, asymptotic or at time t");
    add_model(deviation_cmd);
    deviation_cmd->add_option("--method", o.method, "diffeq (default), perturb, oracle or inversion");
    deviation_cmd->add_option("--t", o.t, "Transient deviation at this time");
    deviation_cmd->add_option("--t-grid", o.t_grid, "Not supported; use --t");
    deviation_cmd->add_option("--block", o.block, "Only block K,L");
    add_output(deviation_cmd);

    auto* passage_cmd = app.add_subcommand("passage", "Mean first passage times to a level (and phase)");
    add_model(passage_cmd);
    passage_cmd->add_option("--level", o.level, "Target level")->required();
    passage_cmd->add_option("--phase", o.phase, "Target phase (1-based); all phases if omitted");
    add_output(passage_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "CPU time of the last block column by both methods");
    bench_cmd->add_option("--n-range", o.n_range, "Phase counts, a:b or a list (default 2:5)");
    bench_cmd->add_option("--c-range", o.c_range, "Capacities, a:b[:step] or a list");
    bench_cmd->add_option("--reps", o.reps, "Timed repetitions per case (default 10)");
    bench_cmd->add_option("--seed", o.seed, "Base seed of the random models (default 1)");
    add_output(bench_cmd);

    auto* mapph_cmd = app.add_subcommand("mapph-build", "Build a MAP/PH/1/C model file");
    add_model(mapph_cmd, "MAP/PH parameter file (JSON)");
    mapph_cmd->add_option("--theta", o.theta, "Attach lost-revenue rewards (or gained, with --gamma)");
    mapph_cmd->add_option("--gamma", o.gamma, "Holding revenue rate for gained-revenue rewards");
    add_output(mapph_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << "error: category=parse message=invalid command line\n";
        return 2;
    }

    try {
        if (*validate_cmd) return cmd_validate(o);
        if (*stationary_cmd) return cmd_stationary(o);
        if (*gmatrix_cmd) return cmd_gmatrix(o);
        if (*reward_cmd) return cmd_reward(o);
        if (*deviation_cmd) return cmd_deviation(o);
        if (*passage_cmd) return cmd_passage(o);
        if (*bench_cmd) return cmd_bench(o);
        if (*mapph_cmd) return cmd_mapph_build(o);
    } catch (const Error& e) {
        std::cerr << "error: category=" << to_string(e.category()) << " message=" << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: category=numerical message=" << e.what() << '\n';
        return 3;
    }
    return 0;
}
