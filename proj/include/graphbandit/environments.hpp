#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphbandit/graph.hpp"
#include "graphbandit/rng.hpp"

namespace gbandit {

// T x K losses in [0,1] plus a provenance tag describing where they came from.
struct LossMatrix {
    long long horizon = 0;
    int num_arms = 0;
    std::vector<double> values;  // row-major
    std::string provenance;

    double at(long long t, int arm) const { return values[t * num_arms + arm]; }
    double& at(long long t, int arm) { return values[t * num_arms + arm]; }

    std::vector<double> row(long long t) const {
        return std::vector<double>(values.begin() + t * num_arms, values.begin() + (t + 1) * num_arms);
    }

    std::vector<double> per_arm_totals() const {
        std::vector<double> totals(num_arms, 0.0);
        for (long long t = 0; t < horizon; ++t)
            for (int i = 0; i < num_arms; ++i) totals[i] += at(t, i);
        return totals;
    }

    void validate() const {
        if (horizon < 1 || num_arms < 2) throw std::invalid_argument("loss matrix: bad dimensions");
        if (static_cast<long long>(values.size()) != horizon * num_arms)
            throw std::invalid_argument("loss matrix: size mismatch");
        for (double v : values)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("loss matrix: entry outside [0,1]");
    }
};

// CSV: one line per round, K comma-separated decimals in [0,1], no header.
inline LossMatrix load_losses(const std::string& text) {
    LossMatrix m;
    std::istringstream in(text);
    std::string line;
    long long row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        int count = 0;
        while (std::getline(fields, cell, ',')) {
            double v;
            try {
                std::size_t pos = 0;
                v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::invalid_argument("loss csv row " + std::to_string(row) + ": bad number");
            }
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("loss csv row " + std::to_string(row) + ": entry outside [0,1]");
            m.values.push_back(v);
            ++count;
        }
        if (row == 0) m.num_arms = count;
        else if (count != m.num_arms)
            throw std::invalid_argument("loss csv row " + std::to_string(row) + ": ragged row");
        ++row;
    }
    m.horizon = row;
    m.provenance = "file";
    m.validate();
    return m;
}

inline std::string write_losses(const LossMatrix& m) {
    std::ostringstream out;
    out.precision(17);
    for (long long t = 0; t < m.horizon; ++t) {
        for (int i = 0; i < m.num_arms; ++i) {
            if (i) out << ',';
            out << m.at(t, i);
        }
        out << '\n';
    }
    return out.str();
}

// Bernoulli arms: the best arm draws losses with mean mu_star, every other
// arm with mean mu_star + gap.
inline LossMatrix gen_stochastic_smallloss(int num_arms, long long horizon, int best_arm,
                                           double mu_star, double gap, std::uint64_t seed) {
    if (best_arm < 0 || best_arm >= num_arms)
        throw std::invalid_argument("stochastic env: best arm out of range");
    if (mu_star < 0.0 || gap < 0.0 || mu_star + gap > 1.0)
        throw std::invalid_argument("stochastic env: means must stay within [0,1]");
    LossMatrix m;
    m.horizon = horizon;
    m.num_arms = num_arms;
    m.values.assign(horizon * num_arms, 0.0);
    Rng rng(seed);
    for (long long t = 0; t < horizon; ++t)
        for (int i = 0; i < num_arms; ++i) {
            const double mean = (i == best_arm) ? mu_star : mu_star + gap;
            m.at(t, i) = rng.bernoulli(mean) ? 1.0 : 0.0;
        }
    std::ostringstream tag;
    tag << "stochastic(best=" << best_arm << ",mu=" << mu_star << ",gap=" << gap << ",seed=" << seed << ")";
    m.provenance = tag.str();
    m.validate();
    return m;
}

// Arm 0 is best (mean mu_best) before the switch round, arm K-1 after it;
// all other positions draw with mean mu_other.
inline LossMatrix gen_shifted_best(int num_arms, long long horizon, long long switch_round,
                                   double mu_best, double mu_other, std::uint64_t seed) {
    if (switch_round < 1 || switch_round > horizon)
        throw std::invalid_argument("shifted env: switch round out of range");
    if (mu_best < 0.0 || mu_best > 1.0 || mu_other < 0.0 || mu_other > 1.0)
        throw std::invalid_argument("shifted env: means must stay within [0,1]");
    LossMatrix m;
    m.horizon = horizon;
    m.num_arms = num_arms;
    m.values.assign(horizon * num_arms, 0.0);
    Rng rng(seed);
    for (long long t = 0; t < horizon; ++t) {
        const int best = (t + 1 < switch_round) ? 0 : num_arms - 1;
        for (int i = 0; i < num_arms; ++i) {
            const double mean = (i == best) ? mu_best : mu_other;
            m.at(t, i) = rng.bernoulli(mean) ? 1.0 : 0.0;
        }
    }
    std::ostringstream tag;
    tag << "shifted(switch=" << switch_round << ",mu_best=" << mu_best << ",mu_other=" << mu_other
        << ",seed=" << seed << ")";
    m.provenance = tag.str();
    m.validate();
    return m;
}

struct LowerBoundPair {
    LossMatrix env_a;
    LossMatrix env_b;
    int arm_u = -1;  // no self-loop, constant loss 0 in A
    int arm_v = -1;  // cannot observe u, constant loss T^-b
};

// Deterministic adversary pair for weakly observable graphs. u is the
// lowest-index arm without a self-loop for which some other arm v cannot
// observe it (lowest such v). Environment A: u costs 0, v costs T^-b,
// everything else costs 1, every round. Environment B flips u's loss to 1 on
// [interval_start, interval_start + interval_len).
inline LowerBoundPair gen_lower_bound_pair(const FeedbackGraph& g, long long horizon, double b,
                                           long long interval_start = -1, long long interval_len = -1) {
    const auto report = classify(g);
    if (report.graph_class != GraphClass::kWeaklyObservable)
        throw std::invalid_argument("lower-bound pair: graph must be weakly observable");
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("lower-bound pair: b must lie in (0,1)");
    LowerBoundPair pair;
    for (int u = 0; u < g.num_arms() && pair.arm_u < 0; ++u) {
        if (g.has_self_loop(u)) continue;
        for (int v = 0; v < g.num_arms(); ++v) {
            if (v == u || g.has_edge(v, u)) continue;
            pair.arm_u = u;
            pair.arm_v = v;
            break;
        }
    }
    if (pair.arm_u < 0)
        throw std::runtime_error("lower-bound pair: no admissible (u,v) pair in a weakly observable graph");
    if (interval_start < 0) interval_start = horizon / 3;
    if (interval_len < 0) interval_len = horizon / 3;
    if (interval_start + interval_len > horizon)
        throw std::invalid_argument("lower-bound pair: interval exceeds the horizon");
    const double v_loss = std::pow(static_cast<double>(horizon), -b);
    LossMatrix a;
    a.horizon = horizon;
    a.num_arms = g.num_arms();
    a.values.assign(horizon * g.num_arms(), 1.0);
    for (long long t = 0; t < horizon; ++t) {
        a.at(t, pair.arm_u) = 0.0;
        a.at(t, pair.arm_v) = v_loss;
    }
    LossMatrix bb = a;
    for (long long t = interval_start; t < interval_start + interval_len; ++t)
        bb.at(t, pair.arm_u) = 1.0;
    std::ostringstream tag;
    tag << "lower_bound(u=" << pair.arm_u << ",v=" << pair.arm_v << ",b=" << b
        << ",interval=[" << interval_start << "," << interval_start + interval_len << "))";
    a.provenance = tag.str() + ":A";
    bb.provenance = tag.str() + ":B";
    a.validate();
    bb.validate();
    pair.env_a = std::move(a);
    pair.env_b = std::move(bb);
    return pair;
}

}  // namespace gbandit
