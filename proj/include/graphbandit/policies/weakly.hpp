#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "graphbandit/estimators.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/omd.hpp"
#include "graphbandit/policy.hpp"

namespace gbandit {

namespace detail {

// Starting point of the weakly observable algorithms: half the mass spread
// over S, half over S-bar (all of it on one side when the other is empty).
inline std::vector<double> weakly_start_point(const FeedbackGraph& g) {
    std::vector<double> p(g.num_arms(), 0.0);
    const int s = g.s(), s_bar = g.s_bar();
    if (s == 0) {
        for (int i : g.no_loop_set()) p[i] = 1.0 / s_bar;
    } else if (s_bar == 0) {
        for (int i : g.self_loop_set()) p[i] = 1.0 / s;
    } else {
        for (int i : g.self_loop_set()) p[i] = 0.5 / s;
        for (int i : g.no_loop_set()) p[i] = 0.5 / s_bar;
    }
    return p;
}

inline RegularizerSpec weakly_regularizer(const FeedbackGraph& g, double eta, double eta_bar) {
    std::vector<double> ent(g.num_arms(), 0.0), bar(g.num_arms(), 0.0);
    for (int i : g.self_loop_set()) bar[i] = 1.0 / eta;
    for (int i : g.no_loop_set()) ent[i] = 1.0 / eta_bar;
    return RegularizerSpec(std::move(ent), std::move(bar));
}

// Correction terms: 2*eta*p_i*est_i^2 on S, 2*eta_bar*est_i^2 on S-bar.
inline std::vector<double> correction_terms(const FeedbackGraph& g, const std::vector<double>& p,
                                            const std::vector<double>& est, double eta, double eta_bar) {
    std::vector<double> a(g.num_arms(), 0.0);
    for (int i : g.self_loop_set()) a[i] = 2.0 * eta * p[i] * est[i] * est[i];
    for (int i : g.no_loop_set()) a[i] = 2.0 * eta_bar * est[i] * est[i];
    return a;
}

}  // namespace detail

// Mirror descent with corrected loss estimates for weakly observable graphs.
// Two decision sets:
//   kBipartite: total mass of S kept at least sqrt(eta_bar); requires a
//               directed complete bipartite graph, eta <= 1/5, eta_bar <= 1/25.
//   kGeneral:   every arm of a weakly dominating set kept at least delta;
//               requires 1/T <= delta <= min{1/125, 1/(4s), 1/(4d)},
//               eta <= 1/25, eta_bar <= delta^(4/3).
class WeaklyObservablePolicy : public Policy {
public:
    enum class Mode { kBipartite, kGeneral };

    static WeaklyObservablePolicy bipartite(const FeedbackGraph& graph, long long horizon,
                                            double eta, double eta_bar) {
        return WeaklyObservablePolicy(graph, horizon, Mode::kBipartite, eta, eta_bar, 0.0, {});
    }

    static WeaklyObservablePolicy general(const FeedbackGraph& graph, long long horizon,
                                          const DominatingSet& dom, double delta,
                                          double eta, double eta_bar) {
        return WeaklyObservablePolicy(graph, horizon, Mode::kGeneral, eta, eta_bar, delta, dom);
    }

    const std::vector<double>& propose() override { return dist_; }

    void update(const FeedbackEvent& event) override {
        const auto est = importance_weighted(graph_, dist_, event);
        auto corrected = detail::correction_terms(graph_, dist_, est, eta_, eta_bar_);
        for (int i = 0; i < graph_.num_arms(); ++i) corrected[i] += est[i];
        dist_ = omd_step(reg_, dist_, corrected, omega_);
    }

    double eta() const { return eta_; }
    double eta_bar() const { return eta_bar_; }
    double delta() const { return delta_; }
    const DominatingSet& dominating_set() const { return dom_; }
    const RegularizerSpec& regularizer() const { return reg_; }
    const DecisionSet& decision_set() const { return omega_; }

private:
    WeaklyObservablePolicy(const FeedbackGraph& graph, long long horizon, Mode mode,
                           double eta, double eta_bar, double delta, DominatingSet dom)
        : graph_(graph), mode_(mode), eta_(eta), eta_bar_(eta_bar), delta_(delta),
          dom_(std::move(dom)), omega_(graph.num_arms()),
          reg_(detail::weakly_regularizer(graph, eta, eta_bar)) {
        const auto report = classify(graph);
        if (horizon < 2LL * graph.num_arms())
            throw std::invalid_argument("weakly observable policy requires T >= 2K");
        if (!(eta > 0.0) || !(eta_bar > 0.0))
            throw std::invalid_argument("learning rates must be positive");
        if (mode == Mode::kBipartite) {
            if (!report.is_directed_complete_bipartite ||
                report.graph_class != GraphClass::kWeaklyObservable)
                throw std::invalid_argument("bipartite policy requires a directed complete bipartite graph");
            if (eta > 0.2 + 1e-15 || eta_bar > 0.04 + 1e-15)
                throw std::invalid_argument("bipartite policy requires eta <= 1/5 and eta_bar <= 1/25");
            omega_.add_group(graph.self_loop_set(), std::sqrt(eta_bar));
        } else {
            if (report.graph_class != GraphClass::kWeaklyObservable)
                throw std::invalid_argument("general policy requires a weakly observable graph");
            if (dom_.members.empty())
                throw std::invalid_argument("general policy requires a dominating set");
            double delta_cap = 1.0 / 125.0;
            if (graph.s() > 0) delta_cap = std::min(delta_cap, 1.0 / (4.0 * graph.s()));
            delta_cap = std::min(delta_cap, 1.0 / (4.0 * dom_.d));
            if (delta < 1.0 / static_cast<double>(horizon) - 1e-15 || delta > delta_cap + 1e-15)
                throw std::invalid_argument("general policy: delta outside its admissible range");
            if (eta > 0.04 + 1e-15)
                throw std::invalid_argument("general policy requires eta <= 1/25");
            if (eta_bar > std::pow(delta, 4.0 / 3.0) + 1e-15)
                throw std::invalid_argument("general policy requires eta_bar <= delta^(4/3)");
            for (int i : dom_.members) omega_.set_lower_bound(i, delta);
        }
        omega_.validate();
        dist_ = detail::weakly_start_point(graph);
        if (!omega_.is_feasible(dist_)) dist_ = bregman_project(reg_, dist_, omega_);
    }

    FeedbackGraph graph_;
    Mode mode_;
    double eta_;
    double eta_bar_;
    double delta_;
    DominatingSet dom_;
    DecisionSet omega_;
    RegularizerSpec reg_;
    std::vector<double> dist_;
};

// Adaptive learner for directed complete bipartite graphs. The mirror-descent
// iterate lives in the sqrt(eta_bar)-mass decision set; the sampling
// distribution zeroes the S coordinates below mu = eta*sqrt(eta_bar)/s and
// renormalizes within S so the total S mass is preserved. The learning rate
// halves when s/eta <= eta * min over S of the estimates accumulated since
// the last reset.
class ChromePolicy : public Policy {
public:
    ChromePolicy(const FeedbackGraph& graph, long long horizon, double eta_init)
        : graph_(graph), horizon_(horizon), eta_(eta_init), omega_(graph.num_arms()),
          reg_(RegularizerSpec::entropy(graph.num_arms(), 1.0)) {
        const auto report = classify(graph);
        if (!report.is_directed_complete_bipartite ||
            report.graph_class != GraphClass::kWeaklyObservable)
            throw std::invalid_argument("chrome policy requires a directed complete bipartite graph");
        if (horizon < 2LL * graph.num_arms())
            throw std::invalid_argument("chrome policy requires T >= 2K");
        if (!(eta_ > 0.0) || eta_ > 0.2 + 1e-15)
            throw std::invalid_argument("chrome policy requires 0 < eta <= 1/5");
        accumulator_.assign(graph.num_arms(), 0.0);
        setup_epoch();
    }

    const std::vector<double>& propose() override { return sampling_; }

    void update(const FeedbackEvent& event) override {
        const auto est = importance_weighted(graph_, sampling_, event);
        auto corrected = detail::correction_terms(graph_, sampling_, est, eta_, eta_bar_);
        for (int i = 0; i < graph_.num_arms(); ++i) corrected[i] += est[i];
        iterate_ = omd_step(reg_, iterate_, corrected, omega_);
        clip_sampling();
        double min_acc = std::numeric_limits<double>::infinity();
        for (int i : graph_.self_loop_set()) {
            accumulator_[i] += est[i];
            min_acc = std::min(min_acc, accumulator_[i]);
        }
        if (graph_.s() / eta_ <= eta_ * min_acc) {
            eta_ *= 0.5;
            ++epoch_;
            std::fill(accumulator_.begin(), accumulator_.end(), 0.0);
            setup_epoch();
        }
    }

    int current_epoch() const override { return epoch_; }
    double eta() const { return eta_; }
    double eta_bar() const { return eta_bar_; }
    double mu() const { return mu_; }
    const std::vector<double>& iterate() const { return iterate_; }

private:
    void setup_epoch() {
        const double s = static_cast<double>(graph_.s());
        eta_bar_ = std::pow(s, -2.0 / 3.0) * std::pow(eta_, 4.0 / 3.0);
        mu_ = eta_ * std::sqrt(eta_bar_) / s;
        omega_ = DecisionSet(graph_.num_arms());
        omega_.add_group(graph_.self_loop_set(), std::sqrt(eta_bar_));
        omega_.validate();
        reg_ = detail::weakly_regularizer(graph_, eta_, eta_bar_);
        iterate_ = detail::weakly_start_point(graph_);
        if (!omega_.is_feasible(iterate_)) iterate_ = bregman_project(reg_, iterate_, omega_);
        clip_sampling();
    }

    void clip_sampling() {
        sampling_ = iterate_;
        double s_mass = 0.0, surviving = 0.0;
        for (int i : graph_.self_loop_set()) {
            s_mass += iterate_[i];
            if (iterate_[i] >= mu_) surviving += iterate_[i];
            else sampling_[i] = 0.0;
        }
        if (surviving <= 0.0) throw std::runtime_error("chrome policy: every S coordinate clipped");
        const double scale = s_mass / surviving;
        for (int i : graph_.self_loop_set())
            if (sampling_[i] > 0.0) sampling_[i] *= scale;
    }

    FeedbackGraph graph_;
    long long horizon_;
    double eta_;
    double eta_bar_ = 0.0;
    double mu_ = 0.0;
    int epoch_ = 1;
    DecisionSet omega_;
    RegularizerSpec reg_;
    std::vector<double> iterate_;
    std::vector<double> sampling_;
    std::vector<double> accumulator_;
};

// Adaptive learner for general weakly observable graphs: the exploration
// floor delta halves (with eta = delta^(1/(2 gamma)) and
// eta_bar = delta^(1/2 + 1/(2 gamma)) recomputed) whenever the estimates
// accumulated over the dominating set reach delta^(-1/gamma).
class WeaklyAdaptivePolicy : public Policy {
public:
    WeaklyAdaptivePolicy(const FeedbackGraph& graph, long long horizon, DominatingSet dom,
                         double gamma, double delta_init)
        : graph_(graph), horizon_(horizon), dom_(std::move(dom)), gamma_(gamma), delta_(delta_init),
          omega_(graph.num_arms()), reg_(RegularizerSpec::entropy(graph.num_arms(), 1.0)) {
        const auto report = classify(graph);
        if (report.graph_class != GraphClass::kWeaklyObservable)
            throw std::invalid_argument("adaptive weakly policy requires a weakly observable graph");
        if (horizon < 2LL * graph.num_arms())
            throw std::invalid_argument("adaptive weakly policy requires T >= 2K");
        if (gamma < 1.0 / 3.0 - 1e-12 || gamma > 0.5 + 1e-12)
            throw std::invalid_argument("adaptive weakly policy requires gamma in [1/3, 1/2]");
        if (dom_.members.empty())
            throw std::invalid_argument("adaptive weakly policy requires a dominating set");
        if (!(delta_ > 0.0) || delta_ > default_delta(graph, dom_) + 1e-15)
            throw std::invalid_argument("adaptive weakly policy: delta_init out of range");
        setup_epoch();
    }

    static double default_delta(const FeedbackGraph& graph, const DominatingSet& dom) {
        double delta = 1.0 / 125.0;
        if (graph.s() > 0) delta = std::min(delta, 1.0 / (4.0 * graph.s()));
        delta = std::min(delta, 1.0 / (4.0 * dom.d));
        return delta;
    }

    const std::vector<double>& propose() override { return dist_; }

    void update(const FeedbackEvent& event) override {
        const auto est = importance_weighted(graph_, dist_, event);
        auto corrected = detail::correction_terms(graph_, dist_, est, eta_, eta_bar_);
        for (int i = 0; i < graph_.num_arms(); ++i) corrected[i] += est[i];
        dist_ = omd_step(reg_, dist_, corrected, omega_);
        for (int i : dom_.members) accumulator_ += est[i];
        if (std::pow(delta_, -1.0 / gamma_) <= accumulator_) {
            delta_ *= 0.5;
            accumulator_ = 0.0;
            ++epoch_;
            setup_epoch();
        }
    }

    int current_epoch() const override { return epoch_; }
    double delta() const { return delta_; }
    double eta() const { return eta_; }
    double eta_bar() const { return eta_bar_; }
    const DominatingSet& dominating_set() const { return dom_; }

private:
    void setup_epoch() {
        eta_ = std::pow(delta_, 1.0 / (2.0 * gamma_));
        eta_bar_ = std::pow(delta_, 0.5 + 1.0 / (2.0 * gamma_));
        omega_ = DecisionSet(graph_.num_arms());
        for (int i : dom_.members) omega_.set_lower_bound(i, delta_);
        omega_.validate();
        reg_ = detail::weakly_regularizer(graph_, eta_, eta_bar_);
        dist_ = detail::weakly_start_point(graph_);
        if (!omega_.is_feasible(dist_)) dist_ = bregman_project(reg_, dist_, omega_);
    }

    FeedbackGraph graph_;
    long long horizon_;
    DominatingSet dom_;
    double gamma_;
    double delta_;
    double eta_ = 0.0;
    double eta_bar_ = 0.0;
    double accumulator_ = 0.0;
    int epoch_ = 1;
    DecisionSet omega_;
    RegularizerSpec reg_;
    std::vector<double> dist_;
};

}  // namespace gbandit
