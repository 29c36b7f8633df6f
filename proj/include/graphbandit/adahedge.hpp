#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "graphbandit/omd.hpp"
#include "graphbandit/regularizer.hpp"

namespace gbandit {

// Hedge with adaptive learning rates, optionally restricted to an active set
// of arms. The distribution keeps at least 1/(|C|T) mass on every active arm
// and exactly zero elsewhere; the learning rate is
//   eta_t = 1 / sqrt(1 + sum_{tau<=t} <p_tau, loss_tau^2>),
// refreshed before each mirror-descent step.
class AdaHedge {
public:
    AdaHedge(int num_arms, std::vector<int> active, long long horizon)
        : num_arms_(num_arms), active_(std::move(active)), omega_(num_arms) {
        if (active_.empty()) throw std::invalid_argument("adahedge: empty active set");
        if (horizon < 1) throw std::invalid_argument("adahedge: horizon must be positive");
        std::vector<bool> is_active(num_arms, false);
        for (int i : active_) {
            if (i < 0 || i >= num_arms) throw std::invalid_argument("adahedge: arm out of range");
            is_active[i] = true;
        }
        const double floor = 1.0 / (static_cast<double>(active_.size()) * static_cast<double>(horizon));
        for (int i = 0; i < num_arms; ++i) {
            if (is_active[i]) omega_.set_lower_bound(i, floor);
            else omega_.pin_zero(i);
        }
        omega_.validate();
        dist_.assign(num_arms, 0.0);
        for (int i : active_) dist_[i] = 1.0 / static_cast<double>(active_.size());
    }

    const std::vector<double>& dist() const { return dist_; }
    double eta() const { return 1.0 / std::sqrt(1.0 + second_moment_); }
    double second_moment() const { return second_moment_; }

    void update(const std::vector<double>& est_loss) {
        if (static_cast<int>(est_loss.size()) != num_arms_)
            throw std::invalid_argument("adahedge: loss dimension mismatch");
        for (double v : est_loss)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("adahedge: losses must be finite and nonnegative");
        for (int i = 0; i < num_arms_; ++i)
            second_moment_ += dist_[i] * est_loss[i] * est_loss[i];
        RegularizerSpec reg = RegularizerSpec::entropy(num_arms_, 1.0 / eta());
        dist_ = omd_step(reg, dist_, est_loss, omega_);
    }

private:
    int num_arms_;
    std::vector<int> active_;
    DecisionSet omega_;
    std::vector<double> dist_;
    double second_moment_ = 0.0;
};

}  // namespace gbandit
