#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "graphbandit/adahedge.hpp"
#include "graphbandit/estimators.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/omd.hpp"
#include "graphbandit/policy.hpp"

namespace gbandit {

inline double clique_meta_eta_max(int beta, int num_arms, long long horizon) {
    const double log_t = std::log(static_cast<double>(horizon));
    const double log_kt = std::log(static_cast<double>(num_arms) * static_cast<double>(horizon));
    return std::min(1.0 / (64.0 * beta), 1.0 / (1000.0 * log_t * log_kt * log_kt));
}

// Per-clique rate escalation: when a clique's meta probability drops below
// 1/rho, double the threshold (to 2/p) and multiply its learning rate by
// sigma = exp(1/ln T).
inline void apply_increasing_learning_rates(const std::vector<double>& meta_dist, int kappa,
                                            double sigma, std::vector<double>& etas,
                                            std::vector<double>& rhos) {
    for (int j = 0; j < kappa; ++j) {
        if (1.0 / meta_dist[j] > rhos[j]) {
            rhos[j] = 2.0 / meta_dist[j];
            etas[j] *= sigma;
        }
    }
}

// Doubling condition of the adaptive wrapper.
inline bool clique_meta_reset_due(double eta, int kappa, double accumulated) {
    return (kappa + 1.0) / eta <= eta * accumulated;
}

// Clique-meta learner for strongly observable graphs: one adaptive Hedge per
// clique of G_S, mirror descent over the meta simplex (cliques plus the arms
// without self-loops), and per-clique learning rates that increase by
// exp(1/ln T) whenever the clique's meta probability drops below its
// threshold (thresholds start at 2*kappa).
class CliqueMetaPolicy : public Policy {
public:
    CliqueMetaPolicy(const FeedbackGraph& graph, CliquePartition partition, long long horizon,
                     double eta, double barrier_c)
        : graph_(graph), part_(std::move(partition)), horizon_(horizon), base_eta_(eta),
          barrier_c_(barrier_c), omega_(part_.beta) {
        const auto report = classify(graph);
        if (report.graph_class != GraphClass::kStronglyObservable)
            throw std::invalid_argument("clique-meta policy requires a strongly observable graph");
        if (horizon < 2LL * graph.num_arms())
            throw std::invalid_argument("clique-meta policy requires T >= 2K");
        const double eta_max = clique_meta_eta_max(part_.beta, graph.num_arms(), horizon);
        if (eta > eta_max * (1.0 + 1e-12))
            throw std::invalid_argument("clique-meta policy: eta exceeds eta_max");
        sigma_ = std::exp(1.0 / std::log(static_cast<double>(horizon)));
        etas_.assign(part_.kappa, eta);
        rhos_.assign(part_.kappa, 2.0 * part_.kappa);
        omega_.set_uniform_lower_bound(1.0 / static_cast<double>(horizon));
        omega_.validate();
        for (int j = 0; j < part_.kappa; ++j)
            hedges_.emplace_back(graph.num_arms(), part_.cliques[j], horizon);
        meta_dist_ = init_point(regularizer(), omega_);
        flat_.assign(graph.num_arms(), 0.0);
        refresh_flat();
    }

    const std::vector<double>& propose() override { return flat_; }

    void update(const FeedbackEvent& event) override { update_round(event); }

    // Runs one full round and reports <p_meta, meta estimate>, the quantity
    // the doubling-trick wrapper accumulates.
    double update_round(const FeedbackEvent& event) {
        const int meta_choice = part_.meta_index[event.chosen_arm];
        const auto tilde = clique_estimator(graph_, part_, meta_dist_, meta_choice,
                                            event.chosen_arm, event);
        std::vector<std::vector<double>> snapshots;
        snapshots.reserve(hedges_.size());
        for (const auto& hedge : hedges_) snapshots.push_back(hedge.dist());
        const auto meta_est = meta_estimator(graph_, part_, snapshots, tilde);
        for (auto& hedge : hedges_) hedge.update(tilde);
        double inner = 0.0;
        for (int j = 0; j < part_.beta; ++j) inner += meta_dist_[j] * meta_est[j];
        meta_dist_ = omd_step(regularizer(), meta_dist_, meta_est, omega_);
        apply_increasing_rate_rule();
        refresh_flat();
        return inner;
    }

    const std::vector<double>& meta_dist() const { return meta_dist_; }
    const std::vector<double>& hedge_dist(int j) const { return hedges_[j].dist(); }
    const std::vector<double>& clique_etas() const { return etas_; }
    const std::vector<double>& clique_rhos() const { return rhos_; }
    double base_eta() const { return base_eta_; }
    double rate_factor() const { return sigma_; }
    const CliquePartition& partition() const { return part_; }

private:
    RegularizerSpec regularizer() const {
        std::vector<double> ent(part_.beta, 0.0), bar(part_.beta, 0.0);
        for (int j = 0; j < part_.kappa; ++j) bar[j] = 1.0 / etas_[j];
        for (int j = part_.kappa; j < part_.beta; ++j) {
            ent[j] = 1.0 / base_eta_;
            bar[j] = barrier_c_;
        }
        return RegularizerSpec(std::move(ent), std::move(bar));
    }

    void apply_increasing_rate_rule() {
        apply_increasing_learning_rates(meta_dist_, part_.kappa, sigma_, etas_, rhos_);
    }

    void refresh_flat() {
        for (int i = 0; i < graph_.num_arms(); ++i) {
            const int j = part_.meta_index[i];
            flat_[i] = graph_.has_self_loop(i) ? meta_dist_[j] * hedges_[j].dist()[i]
                                               : meta_dist_[j];
        }
    }

    FeedbackGraph graph_;
    CliquePartition part_;
    long long horizon_;
    double base_eta_;
    double barrier_c_;
    double sigma_;
    DecisionSet omega_;
    std::vector<AdaHedge> hedges_;
    std::vector<double> etas_;
    std::vector<double> rhos_;
    std::vector<double> meta_dist_;
    std::vector<double> flat_;
};

inline double adaptive_clique_meta_eta(int kappa, int num_arms, long long horizon) {
    const double log_t = std::log(static_cast<double>(horizon));
    const double log_kt = std::log(static_cast<double>(num_arms) * static_cast<double>(horizon));
    return 1.0 / (2000.0 * log_t * log_kt * log_kt + 80.0 * kappa * log_t);
}

// Doubling-trick wrapper: restarts the clique-meta learner with a halved
// learning rate whenever (kappa+1)/eta <= eta * sum of <p, estimate> since
// the last reset. The reset recreates the meta distribution, the per-clique
// rates and thresholds, and the Hedge instances.
class AdaptiveCliqueMetaPolicy : public Policy {
public:
    AdaptiveCliqueMetaPolicy(const FeedbackGraph& graph, CliquePartition partition,
                             long long horizon, double eta_init, double barrier_c)
        : graph_(graph), part_(std::move(partition)), horizon_(horizon), eta_(eta_init),
          barrier_c_(barrier_c) {
        inner_ = std::make_unique<CliqueMetaPolicy>(graph_, part_, horizon_, eta_, barrier_c_);
    }

    const std::vector<double>& propose() override { return inner_->propose(); }

    void update(const FeedbackEvent& event) override {
        accumulated_ += inner_->update_round(event);
        if (clique_meta_reset_due(eta_, part_.kappa, accumulated_)) {
            eta_ *= 0.5;
            accumulated_ = 0.0;
            ++epoch_;
            inner_ = std::make_unique<CliqueMetaPolicy>(graph_, part_, horizon_, eta_, barrier_c_);
        }
    }

    int current_epoch() const override { return epoch_; }
    double eta() const { return eta_; }
    double accumulated() const { return accumulated_; }
    const CliqueMetaPolicy& inner() const { return *inner_; }

private:
    FeedbackGraph graph_;
    CliquePartition part_;
    long long horizon_;
    double eta_;
    double barrier_c_;
    double accumulated_ = 0.0;
    int epoch_ = 1;
    std::unique_ptr<CliqueMetaPolicy> inner_;
};

}  // namespace gbandit
