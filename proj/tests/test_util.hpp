#pragma once

// Shared builders and independent oracles for the test suites. Everything in
// here is test-only and deliberately naive (enumeration, grids, finite
// differences) so it cannot share a bug with the library path it checks.

#include <cmath>
#include <utility>
#include <vector>

#include "graphbandit/graph.hpp"
#include "graphbandit/omd.hpp"
#include "graphbandit/regularizer.hpp"
#include "graphbandit/rng.hpp"

namespace gbtest {

using gbandit::DecisionSet;
using gbandit::FeedbackGraph;
using gbandit::RegularizerSpec;
using gbandit::Rng;

// Self-aware graph whose bidirectional cliques are exactly the given blocks.
inline FeedbackGraph make_clique_graph(const std::vector<std::vector<int>>& blocks, int num_arms) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < num_arms; ++i) edges.push_back({i, i});
    for (const auto& block : blocks)
        for (int a : block)
            for (int b : block)
                if (a != b) edges.push_back({a, b});
    return FeedbackGraph(num_arms, edges);
}

// Directed complete bipartite graph: arms 0..s-1 have self-loops and observe
// every arm of s..s+s_bar-1.
inline FeedbackGraph make_bipartite_graph(int s, int s_bar) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < s; ++i) edges.push_back({i, i});
    for (int i = 0; i < s; ++i)
        for (int j = s; j < s + s_bar; ++j) edges.push_back({i, j});
    return FeedbackGraph(s + s_bar, edges);
}

// The 7-node illustration: S = {0,1,4,5,6} with bidirectional cliques {0,1}
// and {4,5,6}; arms 2 and 3 have no self-loop and are observed by everyone
// else (so the graph is strongly observable).
inline FeedbackGraph make_seven_node_graph() {
    std::vector<std::pair<int, int>> edges;
    for (int i : {0, 1, 4, 5, 6}) edges.push_back({i, i});
    for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {4, 5}, {4, 6}, {5, 6}}) {
        edges.push_back({a, b});
        edges.push_back({b, a});
    }
    for (int j : {2, 3})
        for (int i = 0; i < 7; ++i)
            if (i != j) edges.push_back({i, j});
    return FeedbackGraph(7, edges);
}

// Random strongly observable graph: every arm gets a self-loop or in-edges
// from everyone else; extra random edges on top.
inline FeedbackGraph random_strongly_observable(Rng& rng, int num_arms, double edge_prob = 0.35) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < num_arms; ++i) {
        if (rng.uniform() < 0.75) {
            edges.push_back({i, i});
        } else {
            for (int j = 0; j < num_arms; ++j)
                if (j != i) edges.push_back({j, i});
        }
    }
    for (int i = 0; i < num_arms; ++i)
        for (int j = 0; j < num_arms; ++j)
            if (i != j && rng.uniform() < edge_prob) edges.push_back({i, j});
    return FeedbackGraph(num_arms, edges);
}

// Random observable graph that may be weakly observable.
inline FeedbackGraph random_observable(Rng& rng, int num_arms, double edge_prob = 0.3) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < num_arms; ++i) {
        if (rng.uniform() < 0.5) edges.push_back({i, i});
        else edges.push_back({(i + 1) % num_arms, i});  // keep every node observable
    }
    for (int i = 0; i < num_arms; ++i)
        for (int j = 0; j < num_arms; ++j)
            if (i != j && rng.uniform() < edge_prob) edges.push_back({i, j});
    return FeedbackGraph(num_arms, edges);
}

inline std::vector<double> random_simplex_point(Rng& rng, int dim, double floor = 0.0) {
    std::vector<double> p(dim);
    double total = 0.0;
    for (double& v : p) {
        v = -std::log(1.0 - rng.uniform());
        total += v;
    }
    for (double& v : p) v = floor + (1.0 - dim * floor) * (v / total);
    return p;
}

// <p, loss> + D_psi(p, center): the objective of one constrained OMD step.
inline double step_objective(const RegularizerSpec& reg, const std::vector<double>& p,
                             const std::vector<double>& center, const std::vector<double>& loss) {
    double value = reg.bregman(p, center);
    for (std::size_t i = 0; i < p.size(); ++i) value += p[i] * loss[i];
    return value;
}

// Exhaustive simplex grid oracle (resolution 1/cells) for K in {2,3,4}:
// returns the best feasible grid objective, or +inf if no grid point is
// feasible. Per-coordinate contributions are tabulated so the K=4 triple
// loop stays cheap.
inline double grid_best_objective(const RegularizerSpec& reg, const DecisionSet& omega,
                                  const std::vector<double>& center, const std::vector<double>& loss,
                                  int cells) {
    const int dim = omega.dim();
    const auto grad_center = reg.grad(center);
    // objective(p) = sum_i tab_i[k_i] + const_term, where tab folds loss and
    // the Bregman terms that vary with p.
    double const_term = -reg.psi(center);
    for (int i = 0; i < dim; ++i) const_term += grad_center[i] * center[i];
    std::vector<std::vector<double>> tab(dim, std::vector<double>(cells, 0.0));
    std::vector<int> lo(dim, 1), hi(dim, cells - 1);
    for (int i = 0; i < dim; ++i) {
        lo[i] = std::max(lo[i], static_cast<int>(std::ceil(omega.lower_bound(i) * cells - 1e-9)));
        for (int k = 1; k < cells; ++k) {
            const double v = static_cast<double>(k) / cells;
            double contribution = loss[i] * v - grad_center[i] * v;
            if (reg.entropy_weight(i) > 0.0) contribution += reg.entropy_weight(i) * v * std::log(v);
            if (reg.barrier_weight(i) > 0.0) contribution -= reg.barrier_weight(i) * std::log(v);
            tab[i][k] = contribution;
        }
    }
    std::vector<std::vector<int>> group_mins;  // group floor in grid cells
    std::vector<std::vector<char>> in_group(omega.groups().size(), std::vector<char>(dim, 0));
    for (std::size_t g = 0; g < omega.groups().size(); ++g)
        for (int i : omega.groups()[g].indices) in_group[g][i] = 1;
    auto groups_ok = [&](const std::vector<int>& k) {
        for (std::size_t g = 0; g < omega.groups().size(); ++g) {
            int mass = 0;
            for (int i = 0; i < dim; ++i)
                if (in_group[g][i]) mass += k[i];
            if (static_cast<double>(mass) / cells < omega.groups()[g].min_mass - 1e-12) return false;
        }
        return true;
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> k(dim, 0);
    if (dim == 2) {
        for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0]) {
            k[1] = cells - k[0];
            if (k[1] < lo[1] || k[1] > hi[1] || !groups_ok(k)) continue;
            best = std::min(best, tab[0][k[0]] + tab[1][k[1]]);
        }
    } else if (dim == 3) {
        for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
            for (k[1] = lo[1]; k[1] <= hi[1] && k[0] + k[1] < cells; ++k[1]) {
                k[2] = cells - k[0] - k[1];
                if (k[2] < lo[2] || k[2] > hi[2] || !groups_ok(k)) continue;
                best = std::min(best, tab[0][k[0]] + tab[1][k[1]] + tab[2][k[2]]);
            }
    } else if (dim == 4) {
        for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
            for (k[1] = lo[1]; k[1] <= hi[1] && k[0] + k[1] < cells; ++k[1]) {
                const double partial = tab[0][k[0]] + tab[1][k[1]];
                const int rest = cells - k[0] - k[1];
                const int k2_lo = std::max(lo[2], rest - hi[3]);
                const int k2_hi = std::min(hi[2], rest - lo[3]);
                for (k[2] = k2_lo; k[2] <= k2_hi; ++k[2]) {
                    k[3] = rest - k[2];
                    if (!groups_ok(k)) continue;
                    best = std::min(best, partial + tab[2][k[2]] + tab[3][k[3]]);
                }
            }
    } else {
        throw std::invalid_argument("grid oracle supports K in {2,3,4}");
    }
    return best + const_term;
}

}  // namespace gbtest
