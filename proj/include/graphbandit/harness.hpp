#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "graphbandit/environments.hpp"
#include "graphbandit/estimators.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/policies/factory.hpp"
#include "graphbandit/policy.hpp"
#include "graphbandit/rng.hpp"

namespace gbandit {

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t hash = 1469598103934665603ULL) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= bytes[i];
        hash *= 1099511628211ULL;
    }
    return hash;
}

// Loss-sequence source: a CSV file or one of the generators. Generators
// without an explicit seed use the trial seed, so every seed sees a fresh
// draw while staying reproducible.
struct EnvSpec {
    enum class Kind { kFile, kStochastic, kShifted, kLowerBoundA, kLowerBoundB };

    Kind kind = Kind::kStochastic;
    std::string path;
    double mu_star = 0.1;
    double gap = 0.3;
    int best_arm = 0;
    long long switch_round = 1;
    double mu_best = 0.1;
    double mu_other = 0.5;
    double b = 0.4;
    long long interval_start = -1;
    long long interval_len = -1;
    std::optional<std::uint64_t> seed;

    static EnvSpec parse(const std::string& text) {
        const auto colon = text.find(':');
        const std::string kind_str = text.substr(0, colon);
        const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
        EnvSpec spec;
        if (kind_str == "file") {
            spec.kind = Kind::kFile;
            spec.path = rest;
            if (spec.path.empty()) throw std::invalid_argument("env spec: file path missing");
            return spec;
        }
        if (kind_str == "stochastic") spec.kind = Kind::kStochastic;
        else if (kind_str == "shifted") spec.kind = Kind::kShifted;
        else if (kind_str == "lower_bound_a") spec.kind = Kind::kLowerBoundA;
        else if (kind_str == "lower_bound_b") spec.kind = Kind::kLowerBoundB;
        else throw std::invalid_argument("env spec: unknown kind '" + kind_str + "'");
        std::istringstream in(rest);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("env spec: expected key=value, got '" + item + "'");
            const std::string key = item.substr(0, eq);
            const double value = std::stod(item.substr(eq + 1));
            if (key == "mu_star") spec.mu_star = value;
            else if (key == "gap") spec.gap = value;
            else if (key == "best_arm") spec.best_arm = static_cast<int>(value);
            else if (key == "switch_round") spec.switch_round = static_cast<long long>(value);
            else if (key == "mu_best") spec.mu_best = value;
            else if (key == "mu_other") spec.mu_other = value;
            else if (key == "b") spec.b = value;
            else if (key == "interval_start") spec.interval_start = static_cast<long long>(value);
            else if (key == "interval_len") spec.interval_len = static_cast<long long>(value);
            else if (key == "seed") spec.seed = static_cast<std::uint64_t>(value);
            else throw std::invalid_argument("env spec: unknown key '" + key + "'");
        }
        return spec;
    }

    LossMatrix materialize(const FeedbackGraph& graph, long long horizon,
                           std::uint64_t fallback_seed) const {
        const std::uint64_t use_seed = seed.value_or(fallback_seed);
        switch (kind) {
            case Kind::kFile: {
                std::ifstream in(path);
                if (!in) throw std::runtime_error("cannot open loss file: " + path);
                std::stringstream buffer;
                buffer << in.rdbuf();
                LossMatrix m = load_losses(buffer.str());
                if (m.num_arms != graph.num_arms() || m.horizon != horizon)
                    throw std::invalid_argument("loss file dimensions do not match the run");
                return m;
            }
            case Kind::kStochastic:
                return gen_stochastic_smallloss(graph.num_arms(), horizon, best_arm, mu_star, gap, use_seed);
            case Kind::kShifted:
                return gen_shifted_best(graph.num_arms(), horizon, switch_round, mu_best, mu_other, use_seed);
            case Kind::kLowerBoundA:
                return gen_lower_bound_pair(graph, horizon, b, interval_start, interval_len).env_a;
            case Kind::kLowerBoundB:
                return gen_lower_bound_pair(graph, horizon, b, interval_start, interval_len).env_b;
        }
        throw std::logic_error("env spec: unreachable");
    }
};

struct ExperimentConfig {
    FeedbackGraph graph;
    std::string algo;
    long long horizon = 0;
    Params params;
    std::vector<std::uint64_t> seeds;
    EnvSpec env;
    std::string out_dir;
    bool per_round_trace = false;
    bool record_distributions = false;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const {
        if (horizon < 2LL * graph.num_arms())
            throw std::invalid_argument("experiment: requires T >= 2K");
        if (algo.empty()) throw std::invalid_argument("experiment: missing algorithm");
    }
};

struct RoundRecord {
    long long t = 0;
    int arm = -1;
    double loss = 0.0;
    std::vector<int> observed;
    int epoch = 1;
    std::vector<double> dist;  // filled only when record_distributions is set
};

struct RegretReport {
    std::uint64_t seed = 0;
    long long horizon = 0;
    std::string algo;
    std::vector<double> arm_losses;  // L_i
    double learner_total = 0.0;
    int best_arm = -1;
    double l_star = 0.0;
    double regret = 0.0;  // vs. the best arm
    std::optional<double> l_is_star;
    std::optional<double> l_d;
    int epochs_used = 1;

    double regret_vs(int arm) const { return learner_total - arm_losses[arm]; }
};

struct TrialResult {
    RegretReport report;
    std::vector<RoundRecord> trace;
    std::uint64_t trace_hash = 0;
};

inline TrialResult run_trial(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    const LossMatrix losses = config.env.materialize(config.graph, config.horizon, seed);
    auto policy = make_policy(config.algo, config.graph, config.horizon, config.params);
    Rng rng(seed);
    TrialResult result;
    result.trace.reserve(config.per_round_trace ? config.horizon : 0);
    std::uint64_t hash = fnv1a64(&config.horizon, sizeof(config.horizon));
    double learner_total = 0.0;
    for (long long t = 0; t < config.horizon; ++t) {
        const auto& dist = policy->propose();
        const int arm = rng.categorical(dist);
        const auto row = losses.row(t);
        const FeedbackEvent event = make_event(config.graph, row, arm);
        const double incurred = row[arm];
        learner_total += incurred;
        hash = fnv1a64(&t, sizeof(t), hash);
        hash = fnv1a64(&arm, sizeof(arm), hash);
        hash = fnv1a64(&incurred, sizeof(incurred), hash);
        if (config.per_round_trace) {
            RoundRecord rec;
            rec.t = t;
            rec.arm = arm;
            rec.loss = incurred;
            rec.observed = config.graph.observed_set(arm);
            rec.epoch = policy->current_epoch();
            if (config.record_distributions) rec.dist = dist;
            result.trace.push_back(std::move(rec));
        }
        policy->update(event);
    }
    RegretReport& report = result.report;
    report.seed = seed;
    report.horizon = config.horizon;
    report.algo = config.algo;
    report.arm_losses = losses.per_arm_totals();
    report.learner_total = learner_total;
    report.best_arm = 0;
    for (int i = 1; i < config.graph.num_arms(); ++i)
        if (report.arm_losses[i] < report.arm_losses[report.best_arm]) report.best_arm = i;
    report.l_star = report.arm_losses[report.best_arm];
    report.regret = learner_total - report.l_star;
    if (config.graph.s() > 0) {
        double best = std::numeric_limits<double>::infinity();
        for (int i : config.graph.self_loop_set()) best = std::min(best, report.arm_losses[i]);
        report.l_is_star = best;
    }
    if (config.algo == "weakly-general" || config.algo == "weakly-general-adaptive") {
        const auto dom = greedy_weak_dominating_set(config.graph);
        double total = 0.0;
        for (int i : dom.members) total += report.arm_losses[i];
        report.l_d = total / dom.d;
    }
    report.epochs_used = policy->epochs_used();
    result.trace_hash = hash;
    return result;
}

inline std::string summary_csv_header() {
    return "seed,T,algo,learner_loss,L_star,best_arm,regret,L_iS_star,L_D,epochs_used";
}

inline std::string to_csv_row(const RegretReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << r.seed << ',' << r.horizon << ',' << r.algo << ',' << r.learner_total << ','
        << r.l_star << ',' << r.best_arm << ',' << r.regret << ',';
    if (r.l_is_star) out << *r.l_is_star;
    out << ',';
    if (r.l_d) out << *r.l_d;
    out << ',' << r.epochs_used;
    return out.str();
}

inline RegretReport parse_summary_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw std::invalid_argument("summary row: expected 10 cells");
    RegretReport r;
    r.seed = std::stoull(cells[0]);
    r.horizon = std::stoll(cells[1]);
    r.algo = cells[2];
    r.learner_total = std::stod(cells[3]);
    r.l_star = std::stod(cells[4]);
    r.best_arm = std::stoi(cells[5]);
    r.regret = std::stod(cells[6]);
    if (!cells[7].empty()) r.l_is_star = std::stod(cells[7]);
    if (!cells[8].empty()) r.l_d = std::stod(cells[8]);
    r.epochs_used = std::stoi(cells[9]);
    return r;
}

struct ExperimentResult {
    std::vector<TrialResult> trials;  // in seed order
    double mean_regret = 0.0;
    double std_regret = 0.0;
    double mean_l_star = 0.0;

    std::string summary_csv() const {
        std::ostringstream out;
        out << summary_csv_header() << '\n';
        for (const auto& trial : trials) out << to_csv_row(trial.report) << '\n';
        return out.str();
    }
};

// Runs every seed (in parallel when allowed); the aggregate is assembled in
// seed order, so the output is independent of scheduling.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.seeds.empty()) throw std::invalid_argument("experiment: seed list is empty");
    ExperimentResult result;
    result.trials.resize(config.seeds.size());
    const int max_threads = config.threads > 0
        ? config.threads
        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int workers = static_cast<int>(std::min<std::size_t>(max_threads, config.seeds.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= config.seeds.size()) return;
            try {
                result.trials[idx] = run_trial(config, config.seeds[idx]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    const double n = static_cast<double>(result.trials.size());
    double sum = 0.0, sum_sq = 0.0, sum_lstar = 0.0;
    for (const auto& trial : result.trials) {
        sum += trial.report.regret;
        sum_sq += trial.report.regret * trial.report.regret;
        sum_lstar += trial.report.l_star;
    }
    result.mean_regret = sum / n;
    result.mean_l_star = sum_lstar / n;
    const double var = std::max(0.0, sum_sq / n - result.mean_regret * result.mean_regret);
    result.std_regret = std::sqrt(var);

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        std::ofstream summary(std::filesystem::path(config.out_dir) / "summary.csv");
        summary << result.summary_csv();
        if (config.per_round_trace) {
            for (std::size_t idx = 0; idx < config.seeds.size(); ++idx) {
                std::ofstream per_round(std::filesystem::path(config.out_dir) /
                                        ("trial_" + std::to_string(config.seeds[idx]) + ".csv"));
                per_round << "t,arm,loss,cum_learner,cum_best,epoch\n";
                per_round.precision(17);
                double cum_learner = 0.0, cum_best = 0.0;
                const int best = result.trials[idx].report.best_arm;
                const LossMatrix losses =
                    config.env.materialize(config.graph, config.horizon, config.seeds[idx]);
                for (const auto& rec : result.trials[idx].trace) {
                    cum_learner += rec.loss;
                    cum_best += losses.at(rec.t, best);
                    per_round << rec.t << ',' << rec.arm << ',' << rec.loss << ',' << cum_learner
                              << ',' << cum_best << ',' << rec.epoch << '\n';
                }
            }
        }
    }
    return result;
}

// Least-squares slope of ln(y) against ln(x).
inline double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("slope fit needs at least two points");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(xs.size());
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("slope fit needs positive values");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    if (den == 0.0) throw std::invalid_argument("slope fit: degenerate grid");
    return num / den;
}

struct ScalingRow {
    double grid_value = 0.0;
    double mean_l_star = 0.0;
    double mean_regret = 0.0;
    double slope_vs_previous = std::numeric_limits<double>::quiet_NaN();
};

// Sweeps the horizon or the stochastic environment's mu_star; the slope
// column is log(Reg_k/Reg_{k-1}) / log(g_k/g_{k-1}).
inline std::vector<ScalingRow> scaling_suite(const ExperimentConfig& base, const std::string& grid_key,
                                             const std::vector<double>& grid_values) {
    if (grid_values.size() < 2) throw std::invalid_argument("scaling: need at least two grid points");
    if (grid_key != "T" && grid_key != "mu_star")
        throw std::invalid_argument("scaling: grid must be over T or mu_star");
    std::vector<ScalingRow> rows;
    for (double value : grid_values) {
        ExperimentConfig config = base;
        config.out_dir.clear();
        if (grid_key == "T") config.horizon = static_cast<long long>(value);
        else {
            if (config.env.kind != EnvSpec::Kind::kStochastic)
                throw std::invalid_argument("scaling over mu_star needs a stochastic environment");
            config.env.mu_star = value;
        }
        const ExperimentResult res = run_experiment(config);
        ScalingRow row;
        row.grid_value = value;
        row.mean_l_star = res.mean_l_star;
        row.mean_regret = res.mean_regret;
        if (!rows.empty() && rows.back().mean_regret > 0.0 && res.mean_regret > 0.0)
            row.slope_vs_previous = std::log(res.mean_regret / rows.back().mean_regret) /
                                    std::log(value / rows.back().grid_value);
        rows.push_back(row);
    }
    if (!base.out_dir.empty()) {
        std::filesystem::create_directories(base.out_dir);
        std::ofstream out(std::filesystem::path(base.out_dir) / "scaling.csv");
        out << "grid_value,mean_L_star,mean_regret,slope_vs_previous\n";
        out.precision(17);
        for (const auto& row : rows)
            out << row.grid_value << ',' << row.mean_l_star << ',' << row.mean_regret << ','
                << row.slope_vs_previous << '\n';
    }
    return rows;
}

}  // namespace gbandit
