#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphbandit/regularizer.hpp"

namespace gbandit {

// Constraint region inside the simplex: per-coordinate lower bounds, group
// minimum-mass constraints over disjoint index sets, and coordinates pinned
// to exactly zero (used by subroutines that operate on a subset of arms).
class DecisionSet {
public:
    struct Group {
        std::vector<int> indices;
        double min_mass = 0.0;
    };

    explicit DecisionSet(int dim) : dim_(dim), lower_(dim, 0.0), pinned_(dim, false) {
        if (dim < 1) throw std::invalid_argument("decision set: dimension must be positive");
    }

    int dim() const { return dim_; }

    void set_lower_bound(int i, double value) {
        check_index(i);
        if (value < 0.0 || value >= 1.0)
            throw std::invalid_argument("decision set: lower bound outside [0,1)");
        lower_[i] = value;
    }

    void set_uniform_lower_bound(double value) {
        for (int i = 0; i < dim_; ++i) set_lower_bound(i, value);
    }

    void add_group(std::vector<int> indices, double min_mass) {
        if (indices.empty()) throw std::invalid_argument("decision set: empty group");
        for (int i : indices) check_index(i);
        if (min_mass < 0.0 || min_mass > 1.0)
            throw std::invalid_argument("decision set: group mass outside [0,1]");
        std::sort(indices.begin(), indices.end());
        groups_.push_back(Group{std::move(indices), min_mass});
    }

    void pin_zero(int i) {
        check_index(i);
        pinned_[i] = true;
    }

    double lower_bound(int i) const { return lower_[i]; }
    bool is_pinned(int i) const { return pinned_[i]; }
    const std::vector<Group>& groups() const { return groups_; }

    // Checks structural consistency and joint feasibility of the bounds.
    void validate() const {
        std::vector<int> group_of(dim_, -1);
        for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
            for (int i : groups_[gi].indices) {
                if (group_of[i] >= 0)
                    throw std::invalid_argument("decision set: groups must be disjoint");
                group_of[i] = static_cast<int>(gi);
            }
        }
        for (int i = 0; i < dim_; ++i)
            if (pinned_[i] && lower_[i] > 0.0)
                throw std::invalid_argument("decision set: pinned coordinate with positive lower bound");
        double required = 0.0;
        for (int i = 0; i < dim_; ++i)
            if (group_of[i] < 0 && !pinned_[i]) required += lower_[i];
        for (const auto& g : groups_) {
            double fl = 0.0;
            bool any_free = false;
            for (int i : g.indices)
                if (!pinned_[i]) { fl += lower_[i]; any_free = true; }
            if (!any_free && g.min_mass > 0.0)
                throw std::invalid_argument("decision set: group fully pinned but requires mass");
            required += std::max(g.min_mass, fl);
        }
        if (required > 1.0 + 1e-12)
            throw std::invalid_argument("decision set: constraints are jointly infeasible");
        bool any_unpinned = false;
        for (int i = 0; i < dim_; ++i) any_unpinned |= !pinned_[i];
        if (!any_unpinned) throw std::invalid_argument("decision set: all coordinates pinned");
    }

    bool is_feasible(const std::vector<double>& p, double tol = 1e-9) const {
        if (static_cast<int>(p.size()) != dim_) return false;
        double sum = 0.0;
        for (int i = 0; i < dim_; ++i) {
            if (p[i] < -tol) return false;
            if (pinned_[i] && std::abs(p[i]) > tol) return false;
            if (!pinned_[i] && p[i] < lower_[i] - tol) return false;
            sum += p[i];
        }
        if (std::abs(sum - 1.0) > tol) return false;
        for (const auto& g : groups_) {
            double mass = 0.0;
            for (int i : g.indices) mass += p[i];
            if (mass < g.min_mass - tol) return false;
        }
        return true;
    }

private:
    void check_index(int i) const {
        if (i < 0 || i >= dim_) throw std::invalid_argument("decision set: index out of range");
    }

    int dim_;
    std::vector<double> lower_;
    std::vector<bool> pinned_;
    std::vector<Group> groups_;
};

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverDiagnostics {
    double lambda = 0.0;
    int outer_iterations = 0;
    double normalization_residual = 0.0;
    double kkt_residual = 0.0;
};

namespace detail {

// Probabilities are kept above this floor so logarithms stay finite; the
// mass involved (dim * 1e-60) is far below every tolerance in use.
inline constexpr double kPositivityFloor = 1e-60;
inline constexpr double kCoordCap = 1.5;
inline constexpr double kCoordTol = 1e-12;
inline constexpr int kCoordMaxIter = 200;
inline constexpr double kNormalizationTol = 1e-11;
inline constexpr int kDualMaxIter = 500;
inline constexpr double kKktTol = 1e-8;

// Solves a*(1+y) - b*exp(-y) = c for y = ln x on [ln floor, ln cap];
// safeguarded Newton with bisection fallback. The left side is increasing.
inline double coord_solve(double a, double b, double c) {
    const double y_min = std::log(kPositivityFloor);
    const double y_max = std::log(kCoordCap);
    if (a > 0.0 && b == 0.0) {
        const double y = c / a - 1.0;
        return std::exp(std::clamp(y, y_min, y_max));
    }
    if (a == 0.0 && b > 0.0) {
        if (c >= 0.0) return kCoordCap;
        const double y = std::log(b / -c);
        return std::exp(std::clamp(y, y_min, y_max));
    }
    auto value = [&](double y) { return a * (1.0 + y) - b * std::exp(-y); };
    double lo = y_min, hi = y_max;
    if (value(lo) >= c) return std::exp(lo);
    if (value(hi) <= c) return std::exp(hi);
    double y = std::clamp(c / a - 1.0, lo, hi);
    const double tol = kCoordTol * std::max(1.0, std::abs(c));
    for (int iter = 0; iter < kCoordMaxIter; ++iter) {
        const double f = value(y) - c;
        if (std::abs(f) <= tol) return std::exp(y);
        if (f < 0.0) lo = y; else hi = y;
        const double deriv = a + b * std::exp(-y);
        double next = y - f / deriv;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        y = next;
    }
    return std::exp(0.5 * (lo + hi));
}

struct Workspace {
    std::vector<int> free_coords;          // not pinned
    std::vector<int> group_of;             // -1 when outside every group
    std::vector<double> eff_lower;         // lower bound with positivity floor
};

inline Workspace make_workspace(const DecisionSet& omega) {
    Workspace ws;
    ws.group_of.assign(omega.dim(), -1);
    ws.eff_lower.assign(omega.dim(), 0.0);
    for (std::size_t gi = 0; gi < omega.groups().size(); ++gi)
        for (int i : omega.groups()[gi].indices) ws.group_of[i] = static_cast<int>(gi);
    for (int i = 0; i < omega.dim(); ++i) {
        if (omega.is_pinned(i)) continue;
        ws.free_coords.push_back(i);
        ws.eff_lower[i] = std::max(omega.lower_bound(i), kPositivityFloor);
    }
    return ws;
}

}  // namespace detail

// Solves  argmin_{p in Omega}  sum_i [psi_i(p_i) - target_i * p_i]
// via a scalar dual multiplier on the normalization constraint: every free
// coordinate satisfies grad psi(p)_i = target_i + lambda (+ the multiplier of
// an active group), with violated lower bounds clamped. This is the
// stationarity system of the OMD step when target = grad psi(p_t) - loss.
inline std::vector<double> solve_stationarity_system(const RegularizerSpec& reg,
                                                     const std::vector<double>& targets,
                                                     const DecisionSet& omega,
                                                     SolverDiagnostics* diag = nullptr) {
    using namespace detail;
    omega.validate();
    if (reg.dim() != omega.dim() || static_cast<int>(targets.size()) != omega.dim())
        throw std::invalid_argument("solver: dimension mismatch");
    const Workspace ws = make_workspace(omega);
    const auto& groups = omega.groups();
    const int num_groups = static_cast<int>(groups.size());

    auto coord_at = [&](int i, double shift) {
        const double x = coord_solve(reg.entropy_weight(i), reg.barrier_weight(i), targets[i] + shift);
        return std::max(x, ws.eff_lower[i]);
    };
    // Mass of group gi at multiplier lambda+mu, counting only free coords.
    auto group_free_mass = [&](int gi, double shift) {
        double mass = 0.0;
        for (int i : groups[gi].indices)
            if (!omega.is_pinned(i)) mass += coord_at(i, shift);
        return mass;
    };
    // Required free mass of a group: the constraint minus pinned members (0).
    auto group_required = [&](int gi) { return groups[gi].min_mass; };

    // Total mass at a given lambda, with every group lifted to its minimum.
    auto total_mass = [&](double lambda) {
        double total = 0.0;
        for (int i : ws.free_coords)
            if (ws.group_of[i] < 0) total += coord_at(i, lambda);
        for (int gi = 0; gi < num_groups; ++gi)
            total += std::max(group_required(gi), group_free_mass(gi, lambda));
        return total;
    };

    if (ws.free_coords.empty()) throw SolverError("solver: no free coordinates");

    // Bracket the dual variable from the min/max of the stationarity targets.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i : ws.free_coords) {
        const double a = reg.entropy_weight(i), b = reg.barrier_weight(i);
        const double floor_probe = std::max(ws.eff_lower[i], 1e-9);
        const double g_at_floor = a * (1.0 + std::log(floor_probe)) - b / floor_probe;
        const double g_at_one = a - b;
        lo = std::min(lo, g_at_floor - targets[i]);
        hi = std::max(hi, g_at_one - targets[i]);
    }
    lo -= 1.0;
    hi += 1.0;
    for (int guard = 0; total_mass(lo) > 1.0 && guard < 120; ++guard)
        lo -= std::max(1.0, std::abs(lo));
    for (int guard = 0; total_mass(hi) < 1.0 && guard < 120; ++guard)
        hi += std::max(1.0, std::abs(hi));
    if (total_mass(lo) > 1.0 + kNormalizationTol || total_mass(hi) < 1.0 - kNormalizationTol)
        throw SolverError("solver: failed to bracket the normalization multiplier");

    double lambda = 0.5 * (lo + hi);
    double residual = 0.0;
    int iters = 0;
    for (; iters < kDualMaxIter; ++iters) {
        lambda = 0.5 * (lo + hi);
        const double mass = total_mass(lambda);
        residual = mass - 1.0;
        if (std::abs(residual) <= kNormalizationTol) break;
        if (mass < 1.0) lo = lambda; else hi = lambda;
        if (hi - lo <= 1e-16 * std::max(1.0, std::abs(lambda))) break;
    }

    // Assemble the solution: per-group multipliers for active groups.
    std::vector<double> p(omega.dim(), 0.0);
    std::vector<double> group_mult(num_groups, 0.0);
    for (int i : ws.free_coords)
        if (ws.group_of[i] < 0) p[i] = coord_at(i, lambda);
    for (int gi = 0; gi < num_groups; ++gi) {
        const double need = group_required(gi);
        if (group_free_mass(gi, lambda) >= need) {
            for (int i : groups[gi].indices)
                if (!omega.is_pinned(i)) p[i] = coord_at(i, lambda);
            continue;
        }
        double mu_lo = 0.0, mu_hi = 1.0;
        for (int guard = 0; group_free_mass(gi, lambda + mu_hi) < need && guard < 120; ++guard)
            mu_hi *= 2.0;
        for (int it = 0; it < kDualMaxIter; ++it) {
            const double mu = 0.5 * (mu_lo + mu_hi);
            const double mass = group_free_mass(gi, lambda + mu);
            if (std::abs(mass - need) <= kNormalizationTol) { mu_lo = mu_hi = mu; break; }
            if (mass < need) mu_lo = mu; else mu_hi = mu;
            if (mu_hi - mu_lo <= 1e-16 * std::max(1.0, mu_hi)) break;
        }
        group_mult[gi] = 0.5 * (mu_lo + mu_hi);
        for (int i : groups[gi].indices)
            if (!omega.is_pinned(i)) p[i] = coord_at(i, lambda + group_mult[gi]);
    }

    // KKT verification: primal feasibility, stationarity on free coordinates,
    // nonnegative multipliers on clamped ones.
    double kkt = 0.0;
    double sum = 0.0;
    for (int i = 0; i < omega.dim(); ++i) sum += p[i];
    kkt = std::max(kkt, std::abs(sum - 1.0));
    for (int gi = 0; gi < num_groups; ++gi) {
        double mass = 0.0;
        for (int i : groups[gi].indices) mass += p[i];
        kkt = std::max(kkt, std::max(0.0, groups[gi].min_mass - mass));
        if (group_mult[gi] > 0.0)
            kkt = std::max(kkt, std::abs(mass - groups[gi].min_mass) / std::max(1.0, groups[gi].min_mass));
    }
    for (int i : ws.free_coords) {
        const double shift = lambda + (ws.group_of[i] >= 0 ? group_mult[ws.group_of[i]] : 0.0);
        const double a = reg.entropy_weight(i), b = reg.barrier_weight(i);
        const double grad_i = a * (1.0 + std::log(p[i])) - b / p[i];
        const double scale = std::max(1.0, std::abs(targets[i] + shift));
        if (p[i] > ws.eff_lower[i] * (1.0 + 1e-9) && p[i] < kCoordCap * (1.0 - 1e-9)) {
            kkt = std::max(kkt, std::abs(grad_i - targets[i] - shift) / scale);
        } else if (p[i] <= ws.eff_lower[i] * (1.0 + 1e-9)) {
            kkt = std::max(kkt, std::max(0.0, (targets[i] + shift - grad_i)) / scale);
        }
    }
    if (!(kkt <= kKktTol))
        throw SolverError("solver: KKT residual " + std::to_string(kkt) + " exceeds tolerance (lambda=" +
                          std::to_string(lambda) + ", normalization residual=" + std::to_string(residual) + ")");

    if (diag) {
        diag->lambda = lambda;
        diag->outer_iterations = iters;
        diag->normalization_residual = residual;
        diag->kkt_residual = kkt;
    }
    return p;
}

// One constrained OMD step:   argmin_{p in Omega} <p, loss> + D_psi(p, p_t).
// Loss entries above 1e12 are treated as estimator explosions and rejected.
inline std::vector<double> omd_step(const RegularizerSpec& reg, const std::vector<double>& p_t,
                                    const std::vector<double>& loss, const DecisionSet& omega,
                                    SolverDiagnostics* diag = nullptr) {
    if (static_cast<int>(p_t.size()) != omega.dim() || static_cast<int>(loss.size()) != omega.dim())
        throw std::invalid_argument("omd_step: dimension mismatch");
    std::vector<double> targets(omega.dim(), 0.0);
    for (int i = 0; i < omega.dim(); ++i) {
        if (!std::isfinite(loss[i]) || loss[i] < 0.0)
            throw std::invalid_argument("omd_step: loss must be finite and nonnegative");
        if (loss[i] > 1e12)
            throw SolverError("omd_step: loss entry " + std::to_string(loss[i]) +
                              " looks like an exploded estimator");
        if (omega.is_pinned(i)) continue;
        if (p_t[i] <= 0.0) throw std::domain_error("omd_step: nonpositive coordinate in p_t");
        const double a = reg.entropy_weight(i), b = reg.barrier_weight(i);
        targets[i] = a * (1.0 + std::log(p_t[i])) - b / p_t[i] - loss[i];
    }
    return solve_stationarity_system(reg, targets, omega, diag);
}

// p_1 = argmin_{p in Omega} psi(p): the stationarity system with zero target.
inline std::vector<double> init_point(const RegularizerSpec& reg, const DecisionSet& omega,
                                      SolverDiagnostics* diag = nullptr) {
    return solve_stationarity_system(reg, std::vector<double>(omega.dim(), 0.0), omega, diag);
}

// Bregman projection of q onto Omega.
inline std::vector<double> bregman_project(const RegularizerSpec& reg, const std::vector<double>& q,
                                           const DecisionSet& omega, SolverDiagnostics* diag = nullptr) {
    std::vector<double> targets(omega.dim(), 0.0);
    for (int i = 0; i < omega.dim(); ++i) {
        if (omega.is_pinned(i)) continue;
        if (q[i] <= 0.0) throw std::domain_error("bregman_project: nonpositive coordinate");
        targets[i] = reg.entropy_weight(i) * (1.0 + std::log(q[i])) - reg.barrier_weight(i) / q[i];
    }
    return solve_stationarity_system(reg, targets, omega, diag);
}

}  // namespace gbandit
