#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "graphbandit/estimators.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/policies/exp3g.hpp"
#include "graphbandit/policy.hpp"

namespace gbandit {

// Two-stage learner for self-aware graphs. Stage one runs exponential
// weights whose sampling distribution zeroes out every clique holding at most
// epsilon of the iterate's mass (renormalizing the rest); estimates feed back
// into the weights with the zero-probability convention. The learning rate
// halves (new epoch) when 1/eta <= 4*eta*kappa*min_i of the accumulated
// estimates, and a new meta-epoch resets eta to eta_init once eta falls below
// sqrt(1/(alpha*T)). After floor(log2 T) meta-epochs, stage two runs a fresh
// worst-case hybrid learner for the remaining rounds.
class ClippedTwoStagePolicy : public Policy {
public:
    ClippedTwoStagePolicy(const FeedbackGraph& graph, CliquePartition partition, long long horizon,
                          double alpha_hint)
        : graph_(graph), part_(std::move(partition)), horizon_(horizon), alpha_(alpha_hint) {
        const auto report = classify(graph);
        if (!report.is_self_aware)
            throw std::invalid_argument("clipped two-stage policy requires a self-aware graph");
        if (horizon < 2LL * graph.num_arms())
            throw std::invalid_argument("clipped two-stage policy requires T >= 2K");
        if (!(alpha_ >= 1.0)) throw std::invalid_argument("alpha hint must be at least 1");
        eta_init_ = 1.0 / (4.0 * part_.kappa);
        eta_ = eta_init_;
        epsilon_ = std::max(2.0 * eta_, 1.0 / static_cast<double>(horizon_));
        meta_epoch_cap_ = static_cast<int>(std::floor(std::log2(static_cast<double>(horizon_))));
        switch_threshold_ = std::sqrt(1.0 / (alpha_ * static_cast<double>(horizon_)));
        cumulative_.assign(graph.num_arms(), 0.0);
        rebuild_distributions();
    }

    const std::vector<double>& propose() override {
        return stage_ == 2 ? fallback_->propose() : sampling_;
    }

    void update(const FeedbackEvent& event) override {
        if (stage_ == 2) {
            fallback_->update(event);
            return;
        }
        const auto est = importance_weighted(graph_, sampling_, event);
        for (int i = 0; i < graph_.num_arms(); ++i) cumulative_[i] += est[i];
        double min_acc = cumulative_[0];
        for (double v : cumulative_) min_acc = std::min(min_acc, v);
        if (1.0 / eta_ <= 4.0 * eta_ * part_.kappa * min_acc) {
            eta_ *= 0.5;
            epsilon_ = std::max(2.0 * eta_, 1.0 / static_cast<double>(horizon_));
            ++epoch_;
            if (eta_ <= switch_threshold_) {
                ++meta_epoch_;
                if (meta_epoch_ > meta_epoch_cap_) {
                    start_stage_two();
                    return;
                }
                eta_ = eta_init_;
                epsilon_ = std::max(2.0 * eta_, 1.0 / static_cast<double>(horizon_));
            }
            std::fill(cumulative_.begin(), cumulative_.end(), 0.0);
        }
        rebuild_distributions();
    }

    int current_epoch() const override { return epoch_; }
    int current_meta_epoch() const override { return meta_epoch_; }
    int stage() const { return stage_; }
    int meta_epoch_cap() const { return meta_epoch_cap_; }
    double eta() const { return eta_; }
    double epsilon() const { return epsilon_; }
    double eta_init() const { return eta_init_; }
    const std::vector<double>& iterate() const { return iterate_; }

private:
    void start_stage_two() {
        stage_ = 2;
        const double eta2 = 1.0 / std::sqrt(alpha_ * static_cast<double>(horizon_));
        fallback_ = std::make_unique<OmdBanditPolicy>(graph_, horizon_, eta2,
                                                      OmdBanditPolicy::Mode::kHybrid,
                                                      64.0 * graph_.num_arms());
        ++epoch_;
    }

    // iterate = softmax(-eta * cumulative); sampling = iterate with every
    // clique of mass <= epsilon zeroed, renormalized.
    void rebuild_distributions() {
        const int k = graph_.num_arms();
        iterate_.assign(k, 0.0);
        double max_score = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) max_score = std::max(max_score, -eta_ * cumulative_[i]);
        double total = 0.0;
        for (int i = 0; i < k; ++i) {
            iterate_[i] = std::exp(-eta_ * cumulative_[i] - max_score);
            total += iterate_[i];
        }
        for (double& v : iterate_) v /= total;
        sampling_ = iterate_;
        double kept = 0.0;
        for (const auto& clique : part_.cliques) {
            double mass = 0.0;
            for (int i : clique) mass += iterate_[i];
            if (mass <= epsilon_) {
                for (int i : clique) sampling_[i] = 0.0;
            } else {
                kept += mass;
            }
        }
        if (kept <= 0.0) throw std::runtime_error("clipped two-stage: every clique was clipped");
        for (double& v : sampling_) v /= kept;
    }

    FeedbackGraph graph_;
    CliquePartition part_;
    long long horizon_;
    double alpha_;
    double eta_init_;
    double eta_;
    double epsilon_;
    double switch_threshold_;
    int meta_epoch_cap_;
    int stage_ = 1;
    int epoch_ = 1;
    int meta_epoch_ = 1;
    std::vector<double> cumulative_;
    std::vector<double> iterate_;
    std::vector<double> sampling_;
    std::unique_ptr<OmdBanditPolicy> fallback_;
};

}  // namespace gbandit
