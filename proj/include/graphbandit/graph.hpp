#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gbandit {

// Directed feedback graph over K arms. Playing arm j reveals the loss of
// every arm i with j in in_neighbors(i).
class FeedbackGraph {
public:
    FeedbackGraph(int num_arms, const std::vector<std::pair<int, int>>& edge_list)
        : num_arms_(num_arms), adj_(num_arms * num_arms, false), in_neighbors_(num_arms) {
        if (num_arms < 2) throw std::invalid_argument("feedback graph needs K >= 2");
        for (const auto& [from, to] : edge_list) {
            if (from < 0 || from >= num_arms || to < 0 || to >= num_arms)
                throw std::invalid_argument("edge endpoint out of range");
            if (!adj_[from * num_arms + to]) {
                adj_[from * num_arms + to] = true;
                edges_.emplace_back(from, to);
                in_neighbors_[to].push_back(from);
            }
        }
        std::sort(edges_.begin(), edges_.end());
        for (auto& nbrs : in_neighbors_) std::sort(nbrs.begin(), nbrs.end());
        for (int i = 0; i < num_arms; ++i) {
            if (has_edge(i, i)) self_loop_set_.push_back(i);
            else no_loop_set_.push_back(i);
        }
    }

    int num_arms() const { return num_arms_; }
    bool has_edge(int from, int to) const { return adj_[from * num_arms_ + to]; }
    bool bidirectional(int a, int b) const { return has_edge(a, b) && has_edge(b, a); }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& in_neighbors(int i) const { return in_neighbors_[i]; }
    bool has_self_loop(int i) const { return adj_[i * num_arms_ + i]; }
    // S: arms with a self-loop; S-bar: arms without one.
    const std::vector<int>& self_loop_set() const { return self_loop_set_; }
    const std::vector<int>& no_loop_set() const { return no_loop_set_; }
    int s() const { return static_cast<int>(self_loop_set_.size()); }
    int s_bar() const { return static_cast<int>(no_loop_set_.size()); }

    // Arms revealed when `chosen` is played.
    std::vector<int> observed_set(int chosen) const {
        std::vector<int> out;
        for (int i = 0; i < num_arms_; ++i)
            if (has_edge(chosen, i)) out.push_back(i);
        return out;
    }

private:
    int num_arms_;
    std::vector<bool> adj_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> in_neighbors_;
    std::vector<int> self_loop_set_;
    std::vector<int> no_loop_set_;
};

// Text format: first non-comment line K, then one directed edge "i j" per
// line (0-indexed, "i i" is a self-loop). '#' starts a comment line.
// Duplicate edges are dropped with a warning.
inline FeedbackGraph parse_graph(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    std::string line;
    int num_arms = -1;
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> seen;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream fields(line);
        if (num_arms < 0) {
            std::string tok;
            if (!(fields >> tok)) continue;  // skip leading blanks/comments
            try {
                std::size_t pos = 0;
                num_arms = std::stoi(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw std::invalid_argument("graph line " + std::to_string(line_no) + ": bad arm count");
            }
            std::string extra;
            if (fields >> extra)
                throw std::invalid_argument("graph line " + std::to_string(line_no) + ": expected K alone");
            if (num_arms < 2)
                throw std::invalid_argument("graph file: K must be at least 2");
            continue;
        }
        int from, to;
        if (!(fields >> from)) continue;  // blank line
        std::string extra;
        if (!(fields >> to) || (fields >> extra))
            throw std::invalid_argument("graph line " + std::to_string(line_no) + ": expected \"i j\"");
        if (from < 0 || from >= num_arms || to < 0 || to >= num_arms)
            throw std::invalid_argument("graph line " + std::to_string(line_no) + ": node index out of range");
        if (!seen.insert({from, to}).second) {
            if (warnings)
                warnings->push_back("duplicate edge " + std::to_string(from) + " " + std::to_string(to) + " ignored");
            continue;
        }
        edges.emplace_back(from, to);
    }
    if (num_arms < 0) throw std::invalid_argument("graph file: missing arm count");
    return FeedbackGraph(num_arms, edges);
}

enum class NodeClass { kUnobservable, kStrong, kWeak };
enum class GraphClass { kUnobservable, kStronglyObservable, kWeaklyObservable };

struct ObservabilityReport {
    std::vector<NodeClass> per_node;
    GraphClass graph_class = GraphClass::kUnobservable;
    bool is_self_aware = false;
    bool is_directed_complete_bipartite = false;
};

// A node is observable if someone observes it; strongly observable if it has
// a self-loop or everyone else observes it; weakly observable otherwise.
inline ObservabilityReport classify(const FeedbackGraph& g) {
    const int k = g.num_arms();
    ObservabilityReport report;
    report.per_node.resize(k);
    bool any_unobservable = false, any_weak = false;
    for (int i = 0; i < k; ++i) {
        const int in_degree = static_cast<int>(g.in_neighbors(i).size());
        if (in_degree == 0) {
            report.per_node[i] = NodeClass::kUnobservable;
            any_unobservable = true;
        } else if (g.has_self_loop(i) || in_degree == k - 1) {
            // in_degree == k-1 without a self-loop means everyone else observes i.
            report.per_node[i] = NodeClass::kStrong;
        } else {
            report.per_node[i] = NodeClass::kWeak;
            any_weak = true;
        }
    }
    if (any_unobservable) report.graph_class = GraphClass::kUnobservable;
    else if (any_weak) report.graph_class = GraphClass::kWeaklyObservable;
    else report.graph_class = GraphClass::kStronglyObservable;
    report.is_self_aware = (g.s() == k);
    if (g.s() > 0 && g.s_bar() > 0) {
        bool complete = true;
        for (int i : g.self_loop_set())
            for (int j : g.no_loop_set())
                if (!g.has_edge(i, j)) { complete = false; break; }
        report.is_directed_complete_bipartite = complete;
    }
    return report;
}

// Partition of S into cliques of G_S plus the meta-graph indexing: cliques
// first (0..kappa-1), then the arms of S-bar in increasing order.
struct CliquePartition {
    std::vector<std::vector<int>> cliques;
    int kappa = 0;
    int beta = 0;
    std::vector<int> meta_index;  // arm -> meta node

    int clique_of(int arm) const { return meta_index[arm]; }
};

// Lowest-index greedy: seed a clique with the smallest unassigned arm of S,
// then repeatedly add the smallest arm bidirectionally connected to every
// current member. Clique membership requires edges in both directions.
inline CliquePartition greedy_clique_partition(const FeedbackGraph& g) {
    CliquePartition part;
    part.meta_index.assign(g.num_arms(), -1);
    std::vector<int> unassigned = g.self_loop_set();
    while (!unassigned.empty()) {
        std::vector<int> clique{unassigned.front()};
        unassigned.erase(unassigned.begin());
        bool grew = true;
        while (grew) {
            grew = false;
            for (auto it = unassigned.begin(); it != unassigned.end(); ++it) {
                bool connected = true;
                for (int member : clique)
                    if (!g.bidirectional(*it, member)) { connected = false; break; }
                if (connected) {
                    clique.push_back(*it);
                    unassigned.erase(it);
                    grew = true;
                    break;
                }
            }
        }
        std::sort(clique.begin(), clique.end());
        part.cliques.push_back(std::move(clique));
    }
    part.kappa = static_cast<int>(part.cliques.size());
    part.beta = part.kappa + g.s_bar();
    for (int j = 0; j < part.kappa; ++j)
        for (int arm : part.cliques[j]) part.meta_index[arm] = j;
    int next = part.kappa;
    for (int arm : g.no_loop_set()) part.meta_index[arm] = next++;
    return part;
}

struct DominatingSet {
    std::vector<int> members;
    int d = 0;
};

// Greedy set cover of the weakly observable nodes; each step picks the node
// observing the most uncovered weak nodes (ties to the lowest index). If S is
// nonempty and disjoint from the cover, the lowest-index arm of S is appended
// so that adaptive runs always have a self-loop arm inside D.
inline DominatingSet greedy_weak_dominating_set(const FeedbackGraph& g) {
    const auto report = classify(g);
    const int k = g.num_arms();
    for (int i = 0; i < k; ++i)
        if (report.per_node[i] == NodeClass::kUnobservable)
            throw std::invalid_argument("dominating set: node " + std::to_string(i) + " is unobservable");
    std::vector<bool> uncovered(k, false);
    int remaining = 0;
    for (int i = 0; i < k; ++i)
        if (report.per_node[i] == NodeClass::kWeak) { uncovered[i] = true; ++remaining; }
    DominatingSet ds;
    std::vector<bool> in_set(k, false);
    while (remaining > 0) {
        int best = -1, best_cover = 0;
        for (int cand = 0; cand < k; ++cand) {
            if (in_set[cand]) continue;
            int cover = 0;
            for (int i = 0; i < k; ++i)
                if (uncovered[i] && g.has_edge(cand, i)) ++cover;
            if (cover > best_cover) { best_cover = cover; best = cand; }
        }
        if (best < 0) throw std::runtime_error("dominating set: greedy cover failed");
        in_set[best] = true;
        ds.members.push_back(best);
        for (int i = 0; i < k; ++i)
            if (uncovered[i] && g.has_edge(best, i)) { uncovered[i] = false; --remaining; }
    }
    if (g.s() > 0) {
        bool touches_s = false;
        for (int m : ds.members)
            if (g.has_self_loop(m)) { touches_s = true; break; }
        if (!touches_s) ds.members.push_back(g.self_loop_set().front());
    }
    std::sort(ds.members.begin(), ds.members.end());
    ds.d = static_cast<int>(ds.members.size());
    return ds;
}

// Lowest-index greedy maximal independent set; i and j are independent iff
// neither (i,j) nor (j,i) is an edge. Its size is the default alpha estimate.
inline std::vector<int> greedy_independent_set(const FeedbackGraph& g) {
    std::vector<int> indep;
    for (int i = 0; i < g.num_arms(); ++i) {
        bool ok = true;
        for (int j : indep)
            if (g.has_edge(i, j) || g.has_edge(j, i)) { ok = false; break; }
        if (ok) indep.push_back(i);
    }
    return indep;
}

inline const char* to_string(GraphClass c) {
    switch (c) {
        case GraphClass::kUnobservable: return "unobservable";
        case GraphClass::kStronglyObservable: return "strongly_observable";
        case GraphClass::kWeaklyObservable: return "weakly_observable";
    }
    return "?";
}

inline const char* to_string(NodeClass c) {
    switch (c) {
        case NodeClass::kUnobservable: return "unobservable";
        case NodeClass::kStrong: return "strong";
        case NodeClass::kWeak: return "weak";
    }
    return "?";
}

}  // namespace gbandit
