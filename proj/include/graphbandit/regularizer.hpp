#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gbandit {

// Per-coordinate composite of negative entropy and log-barrier terms:
//   psi(p) = sum_i [ entropy_w[i] * p_i ln p_i + barrier_w[i] * ln(1/p_i) ].
// A weight of zero means the component is absent on that coordinate.
class RegularizerSpec {
public:
    RegularizerSpec(std::vector<double> entropy_weights, std::vector<double> barrier_weights)
        : entropy_w_(std::move(entropy_weights)), barrier_w_(std::move(barrier_weights)) {
        if (entropy_w_.size() != barrier_w_.size())
            throw std::invalid_argument("regularizer: weight vectors must have equal length");
        for (std::size_t i = 0; i < entropy_w_.size(); ++i) {
            if (entropy_w_[i] < 0.0 || barrier_w_[i] < 0.0)
                throw std::invalid_argument("regularizer: weights must be nonnegative");
            if (entropy_w_[i] == 0.0 && barrier_w_[i] == 0.0)
                throw std::invalid_argument("regularizer: every coordinate needs a component");
        }
    }

    static RegularizerSpec entropy(int dim, double weight) {
        return RegularizerSpec(std::vector<double>(dim, weight), std::vector<double>(dim, 0.0));
    }
    static RegularizerSpec barrier(int dim, double weight) {
        return RegularizerSpec(std::vector<double>(dim, 0.0), std::vector<double>(dim, weight));
    }

    int dim() const { return static_cast<int>(entropy_w_.size()); }
    double entropy_weight(int i) const { return entropy_w_[i]; }
    double barrier_weight(int i) const { return barrier_w_[i]; }

    double psi(const std::vector<double>& p) const {
        check_dim(p);
        double total = 0.0;
        for (int i = 0; i < dim(); ++i) {
            const double x = p[i];
            if (x < 0.0) throw std::domain_error("psi: negative coordinate");
            if (x == 0.0) {
                // p ln p -> 0; the barrier is infinite at zero.
                if (barrier_w_[i] > 0.0) throw std::domain_error("psi: zero coordinate under log-barrier");
                continue;
            }
            total += entropy_w_[i] * x * std::log(x) - barrier_w_[i] * std::log(x);
        }
        return total;
    }

    // grad_i = entropy_w * (1 + ln p_i) - barrier_w / p_i.
    std::vector<double> grad(const std::vector<double>& p) const {
        check_dim(p);
        std::vector<double> g(dim());
        for (int i = 0; i < dim(); ++i) {
            if (p[i] <= 0.0) throw std::domain_error("grad_psi: nonpositive coordinate");
            g[i] = entropy_w_[i] * (1.0 + std::log(p[i])) - barrier_w_[i] / p[i];
        }
        return g;
    }

    // Closed-form diagonal Hessian: entropy -> w/p_i, log-barrier -> w/p_i^2.
    std::vector<double> hess_diag(const std::vector<double>& p) const {
        check_dim(p);
        std::vector<double> h(dim());
        for (int i = 0; i < dim(); ++i) {
            if (p[i] <= 0.0) throw std::domain_error("hess_psi: nonpositive coordinate");
            h[i] = entropy_w_[i] / p[i] + barrier_w_[i] / (p[i] * p[i]);
        }
        return h;
    }

    // D_psi(p, q) accumulated per component: entropy gives the generalized KL
    // term w * (p ln(p/q) - p + q); the barrier gives w * h(p/q) with
    // h(x) = x - 1 - ln x.
    double bregman(const std::vector<double>& p, const std::vector<double>& q) const {
        check_dim(p);
        check_dim(q);
        double total = 0.0;
        for (int i = 0; i < dim(); ++i) {
            if (q[i] <= 0.0) throw std::domain_error("bregman: nonpositive reference coordinate");
            if (p[i] < 0.0) throw std::domain_error("bregman: negative coordinate");
            if (entropy_w_[i] > 0.0) {
                const double kl = (p[i] == 0.0) ? q[i] : p[i] * std::log(p[i] / q[i]) - p[i] + q[i];
                total += entropy_w_[i] * kl;
            }
            if (barrier_w_[i] > 0.0) {
                if (p[i] <= 0.0) throw std::domain_error("bregman: zero coordinate under log-barrier");
                const double ratio = p[i] / q[i];
                total += barrier_w_[i] * (ratio - 1.0 - std::log(ratio));
            }
        }
        return total;
    }

private:
    void check_dim(const std::vector<double>& v) const {
        if (static_cast<int>(v.size()) != dim())
            throw std::invalid_argument("regularizer: dimension mismatch");
    }

    std::vector<double> entropy_w_;
    std::vector<double> barrier_w_;
};

// Squared local norm of (est - z*1) in the inverse Hessian metric at p:
// sum_i (est_i - z)^2 / H_ii.
inline double local_norm_shifted(const RegularizerSpec& reg, const std::vector<double>& p,
                                 const std::vector<double>& est, double z) {
    const auto h = reg.hess_diag(p);
    if (est.size() != h.size()) throw std::invalid_argument("local_norm: dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (!(h[i] > 0.0) || !std::isfinite(h[i]))
            throw std::domain_error("local_norm: degenerate Hessian entry");
        const double d = est[i] - z;
        total += d * d / h[i];
    }
    return total;
}

// The shift minimizing the local norm is the H^{-1}-weighted mean of est.
inline double best_shift(const RegularizerSpec& reg, const std::vector<double>& p,
                         const std::vector<double>& est) {
    const auto h = reg.hess_diag(p);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        num += est[i] / h[i];
        den += 1.0 / h[i];
    }
    return num / den;
}

inline double min_local_norm_shifted(const RegularizerSpec& reg, const std::vector<double>& p,
                                     const std::vector<double>& est) {
    return local_norm_shifted(reg, p, est, best_shift(reg, p, est));
}

// True iff p_next stays within [p/2, 2p] on every coordinate with p_i > 0.
inline bool check_multiplicative_stability(const std::vector<double>& p,
                                           const std::vector<double>& p_next) {
    if (p.size() != p_next.size())
        throw std::invalid_argument("multiplicative stability: dimension mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (p_next[i] < 0.5 * p[i] || p_next[i] > 2.0 * p[i]) return false;
    }
    return true;
}

}  // namespace gbandit
