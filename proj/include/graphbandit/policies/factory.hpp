#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "graphbandit/adahedge.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/policies/clipped_two_stage.hpp"
#include "graphbandit/policies/clique_meta.hpp"
#include "graphbandit/policies/exp3g.hpp"
#include "graphbandit/policies/weakly.hpp"
#include "graphbandit/policy.hpp"

namespace gbandit {

// Runs the adaptive Hedge subroutine as a standalone policy. Only valid on
// graphs where every arm is observed by everyone (W = 1), so the raw losses
// can be fed straight through.
class FullInformationHedgePolicy : public Policy {
public:
    FullInformationHedgePolicy(const FeedbackGraph& graph, long long horizon)
        : graph_(graph), hedge_(graph.num_arms(), all_arms(graph), horizon) {
        for (int i = 0; i < graph.num_arms(); ++i)
            if (static_cast<int>(graph.in_neighbors(i).size()) != graph.num_arms())
                throw std::invalid_argument("hedge policy requires full-information feedback");
    }

    const std::vector<double>& propose() override { return hedge_.dist(); }

    void update(const FeedbackEvent& event) override {
        validate_event(graph_, event);
        std::vector<double> losses(graph_.num_arms(), 0.0);
        for (const auto& [arm, loss] : event.observed) losses[arm] = loss;
        hedge_.update(losses);
    }

    const AdaHedge& hedge() const { return hedge_; }

private:
    static std::vector<int> all_arms(const FeedbackGraph& g) {
        std::vector<int> arms(g.num_arms());
        for (int i = 0; i < g.num_arms(); ++i) arms[i] = i;
        return arms;
    }

    FeedbackGraph graph_;
    AdaHedge hedge_;
};

inline double default_alpha_hint(const FeedbackGraph& graph, const Params& params) {
    if (params.has("alpha")) return params.get("alpha", 0.0);
    return static_cast<double>(greedy_independent_set(graph).size());
}

// Builds a policy by name. Tunings that the fixed-rate variants express in
// terms of unknowable loss totals take those totals from oracle_* parameters
// (or fall back to their worst-case caps); explicit eta/eta_bar/delta
// parameters always win.
inline std::unique_ptr<Policy> make_policy(const std::string& name, const FeedbackGraph& graph,
                                           long long horizon, const Params& params) {
    const int k = graph.num_arms();
    const double t = static_cast<double>(horizon);
    if (name == "exp3g") {
        const double alpha = default_alpha_hint(graph, params);
        const double eta = params.get("eta", 1.0 / std::sqrt(alpha * t));
        const double c = params.get("c", 64.0 * k);
        return std::make_unique<OmdBanditPolicy>(graph, horizon, eta, OmdBanditPolicy::Mode::kHybrid, c);
    }
    if (name == "smallloss") {
        const double cap = 1.0 / (64.0 * k);
        double eta = cap;
        if (params.has("oracle_lstar")) {
            const double lstar = params.get("oracle_lstar", 0.0);
            if (lstar > 0.0) eta = std::min(std::sqrt((graph.s() + 1.0) / lstar), cap);
        }
        eta = params.get("eta", eta);
        const double c = params.get("c", 64.0 * k);
        return std::make_unique<OmdBanditPolicy>(graph, horizon, eta, OmdBanditPolicy::Mode::kSmallLoss, c);
    }
    if (name == "clique-meta") {
        auto part = greedy_clique_partition(graph);
        const double eta_max = clique_meta_eta_max(part.beta, k, horizon);
        const double eta = params.get("eta", eta_max);
        const double c = params.get("c", 64.0 * part.beta);
        return std::make_unique<CliqueMetaPolicy>(graph, std::move(part), horizon, eta, c);
    }
    if (name == "clique-meta-adaptive") {
        auto part = greedy_clique_partition(graph);
        const double eta = params.get("eta", adaptive_clique_meta_eta(part.kappa, k, horizon));
        const double c = params.get("c", 64.0 * part.beta);
        return std::make_unique<AdaptiveCliqueMetaPolicy>(graph, std::move(part), horizon, eta, c);
    }
    if (name == "clipped-two-stage") {
        auto part = greedy_clique_partition(graph);
        const double alpha = default_alpha_hint(graph, params);
        return std::make_unique<ClippedTwoStagePolicy>(graph, std::move(part), horizon, alpha);
    }
    if (name == "weakly-bipartite") {
        double eta = 0.2, eta_bar = 0.04;
        if (params.has("oracle_lis")) {
            const double lis = params.get("oracle_lis", 0.0);
            if (lis > 0.0) {
                eta = std::min(std::sqrt(graph.s() / lis), 0.2);
                eta_bar = std::min(std::pow(lis, -2.0 / 3.0), 0.04);
            }
        }
        eta = params.get("eta", eta);
        eta_bar = params.get("eta_bar", eta_bar);
        return std::make_unique<WeaklyObservablePolicy>(
            WeaklyObservablePolicy::bipartite(graph, horizon, eta, eta_bar));
    }
    if (name == "weakly-general") {
        auto dom = greedy_weak_dominating_set(graph);
        const double gamma = params.get("gamma", 1.0 / 3.0);
        double delta = WeaklyAdaptivePolicy::default_delta(graph, dom);
        double eta = 0.04;
        if (params.has("oracle_ld")) {
            const double ld = params.get("oracle_ld", 0.0);
            if (ld > 0.0) {
                delta = std::min(delta, std::pow(ld, -gamma));
                eta = std::min(std::sqrt(1.0 / ld), 0.04);
            }
        }
        delta = std::max(delta, 1.0 / t);
        delta = params.get("delta", delta);
        double eta_bar = std::pow(delta, 4.0 / 3.0);
        if (params.has("oracle_ld")) {
            const double ld = params.get("oracle_ld", 0.0);
            if (ld > 0.0) eta_bar = std::min(std::sqrt(delta / ld), eta_bar);
        }
        eta = params.get("eta", eta);
        eta_bar = params.get("eta_bar", eta_bar);
        return std::make_unique<WeaklyObservablePolicy>(
            WeaklyObservablePolicy::general(graph, horizon, dom, delta, eta, eta_bar));
    }
    if (name == "chrome") {
        const double eta = params.get("eta", std::min(0.2, 1.0 / graph.s()));
        return std::make_unique<ChromePolicy>(graph, horizon, eta);
    }
    if (name == "weakly-general-adaptive") {
        auto dom = greedy_weak_dominating_set(graph);
        const double gamma = params.get("gamma", 1.0 / 3.0);
        const double delta = params.get("delta", WeaklyAdaptivePolicy::default_delta(graph, dom));
        return std::make_unique<WeaklyAdaptivePolicy>(graph, horizon, std::move(dom), gamma, delta);
    }
    if (name == "adahedge") {
        return std::make_unique<FullInformationHedgePolicy>(graph, horizon);
    }
    throw std::invalid_argument("unknown policy: " + name);
}

}  // namespace gbandit
