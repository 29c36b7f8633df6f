#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "graphbandit/graph.hpp"

namespace gbandit {

// One round of feedback: the arm that was played and the losses of exactly
// the arms it observes.
struct FeedbackEvent {
    int chosen_arm = -1;
    std::map<int, double> observed;
};

inline FeedbackEvent make_event(const FeedbackGraph& g, const std::vector<double>& losses, int chosen) {
    if (chosen < 0 || chosen >= g.num_arms())
        throw std::invalid_argument("make_event: arm out of range");
    FeedbackEvent event;
    event.chosen_arm = chosen;
    for (int i : g.observed_set(chosen)) event.observed[i] = losses[i];
    return event;
}

inline void validate_event(const FeedbackGraph& g, const FeedbackEvent& event) {
    if (event.chosen_arm < 0 || event.chosen_arm >= g.num_arms())
        throw std::invalid_argument("feedback event: arm out of range");
    for (int i = 0; i < g.num_arms(); ++i) {
        const bool should_observe = g.has_edge(event.chosen_arm, i);
        const bool present = event.observed.count(i) > 0;
        if (should_observe != present)
            throw std::invalid_argument("feedback event: observed set does not match the graph");
    }
    for (const auto& [arm, loss] : event.observed)
        if (!(loss >= 0.0 && loss <= 1.0))
            throw std::invalid_argument("feedback event: loss outside [0,1]");
}

// Importance-weighted estimator: hat-l_i = l_i * 1{observed} / W_i with
// W_i the probability mass of i's in-neighborhood. Coordinates with exactly
// zero probability (pinned by a clipping policy) estimate 0; an observed arm
// whose W_i is numerically tiny without being pinned is an explosion.
inline std::vector<double> importance_weighted(const FeedbackGraph& g, const std::vector<double>& p,
                                               const FeedbackEvent& event) {
    validate_event(g, event);
    if (static_cast<int>(p.size()) != g.num_arms())
        throw std::invalid_argument("importance_weighted: dimension mismatch");
    std::vector<double> est(g.num_arms(), 0.0);
    for (const auto& [arm, loss] : event.observed) {
        if (p[arm] == 0.0) continue;
        double w = 0.0;
        for (int j : g.in_neighbors(arm)) w += p[j];
        if (w < 1e-12)
            throw std::runtime_error("importance_weighted: observed arm " + std::to_string(arm) +
                                     " has vanishing observation probability");
        est[arm] = loss / w;
    }
    return est;
}

// Clique-restricted estimator of the clique-meta algorithm. For an arm with a
// self-loop only observations coming from its own clique count; for an arm
// without one the standard estimator applies, with 1 - p_meta at its
// meta-node as the observation probability.
inline std::vector<double> clique_estimator(const FeedbackGraph& g, const CliquePartition& part,
                                            const std::vector<double>& p_meta, int meta_choice,
                                            int chosen_arm, const FeedbackEvent& event) {
    if (static_cast<int>(p_meta.size()) != part.beta)
        throw std::invalid_argument("clique_estimator: meta distribution has wrong dimension");
    if (meta_choice < 0 || meta_choice >= part.beta)
        throw std::invalid_argument("clique_estimator: meta index out of range");
    if (part.meta_index[chosen_arm] != meta_choice)
        throw std::invalid_argument("clique_estimator: chosen arm not under the chosen meta node");
    std::vector<double> est(g.num_arms(), 0.0);
    for (int i : g.self_loop_set()) {
        if (meta_choice >= part.kappa || part.meta_index[i] != meta_choice) continue;
        const auto it = event.observed.find(i);
        if (it == event.observed.end())
            throw std::invalid_argument("clique_estimator: clique member " + std::to_string(i) +
                                        " was not observed");
        if (p_meta[meta_choice] < 1e-12)
            throw std::runtime_error("clique_estimator: vanishing clique probability");
        est[i] = it->second / p_meta[meta_choice];
    }
    for (int i : g.no_loop_set()) {
        if (i == chosen_arm) continue;
        const auto it = event.observed.find(i);
        if (it == event.observed.end())
            throw std::invalid_argument("clique_estimator: arm " + std::to_string(i) +
                                        " without a self-loop was not observed");
        const double denom = 1.0 - p_meta[part.meta_index[i]];
        if (denom < 1e-12)
            throw std::runtime_error("clique_estimator: vanishing observation probability for arm " +
                                     std::to_string(i));
        est[i] = it->second / denom;
    }
    return est;
}

// Meta-node estimator: inner product with the subroutine distribution for a
// clique, the arm estimate itself for a node without a self-loop.
inline std::vector<double> meta_estimator(const FeedbackGraph& g, const CliquePartition& part,
                                          const std::vector<std::vector<double>>& hedge_dists,
                                          const std::vector<double>& tilde_loss) {
    if (static_cast<int>(hedge_dists.size()) != part.kappa)
        throw std::invalid_argument("meta_estimator: need one subroutine distribution per clique");
    std::vector<double> est(part.beta, 0.0);
    for (int j = 0; j < part.kappa; ++j) {
        const auto& dist = hedge_dists[j];
        if (static_cast<int>(dist.size()) != g.num_arms())
            throw std::invalid_argument("meta_estimator: subroutine distribution has wrong dimension");
        double inner = 0.0;
        for (int i = 0; i < g.num_arms(); ++i) {
            if (dist[i] == 0.0) continue;
            if (part.meta_index[i] != j || !g.has_self_loop(i))
                throw std::invalid_argument("meta_estimator: subroutine distribution leaves its clique");
            inner += dist[i] * tilde_loss[i];
        }
        est[j] = inner;
    }
    for (int i : g.no_loop_set()) est[part.meta_index[i]] = tilde_loss[i];
    return est;
}

}  // namespace gbandit
