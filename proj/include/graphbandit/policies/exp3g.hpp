#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "graphbandit/graph.hpp"
#include "graphbandit/omd.hpp"
#include "graphbandit/policy.hpp"

namespace gbandit {

// Mirror descent over the 1/T-clipped simplex for strongly observable graphs,
// in two regularizer flavors:
//   kHybrid:    entropy 1/eta plus log-barrier c on every arm (worst-case
//               sqrt(alpha T) tuning, c = 64K),
//   kSmallLoss: log-barrier 1/eta on arms with a self-loop, entropy 1/eta
//               plus log-barrier c on the others (first-order tuning,
//               requires eta <= 1/(64K)).
class OmdBanditPolicy : public Policy {
public:
    enum class Mode { kHybrid, kSmallLoss };

    OmdBanditPolicy(const FeedbackGraph& graph, long long horizon, double eta, Mode mode, double barrier_c)
        : graph_(graph), omega_(graph.num_arms()),
          reg_(build_regularizer(graph, eta, mode, barrier_c)) {
        const auto report = classify(graph);
        if (report.graph_class != GraphClass::kStronglyObservable)
            throw std::invalid_argument("policy requires a strongly observable graph");
        if (horizon < 2LL * graph.num_arms())
            throw std::invalid_argument("policy requires T >= 2K");
        if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
        if (mode == Mode::kSmallLoss && eta > 1.0 / (64.0 * graph.num_arms()) + 1e-15)
            throw std::invalid_argument("small-loss variant requires eta <= 1/(64K)");
        omega_.set_uniform_lower_bound(1.0 / static_cast<double>(horizon));
        omega_.validate();
        dist_ = init_point(reg_, omega_);
    }

    const std::vector<double>& propose() override { return dist_; }

    void update(const FeedbackEvent& event) override {
        const auto est = importance_weighted(graph_, dist_, event);
        dist_ = omd_step(reg_, dist_, est, omega_);
    }

    const RegularizerSpec& regularizer() const { return reg_; }
    const DecisionSet& decision_set() const { return omega_; }

private:
    static RegularizerSpec build_regularizer(const FeedbackGraph& g, double eta, Mode mode, double c) {
        const int k = g.num_arms();
        std::vector<double> ent(k, 0.0), bar(k, 0.0);
        if (mode == Mode::kHybrid) {
            for (int i = 0; i < k; ++i) { ent[i] = 1.0 / eta; bar[i] = c; }
        } else {
            for (int i : g.self_loop_set()) bar[i] = 1.0 / eta;
            for (int i : g.no_loop_set()) { ent[i] = 1.0 / eta; bar[i] = c; }
        }
        return RegularizerSpec(std::move(ent), std::move(bar));
    }

    FeedbackGraph graph_;
    DecisionSet omega_;
    RegularizerSpec reg_;
    std::vector<double> dist_;
};

}  // namespace gbandit
