#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "graphbandit/policies/factory.hpp"
#include "graphbandit/rng.hpp"
#include "test_util.hpp"

using namespace gbandit;
using Catch::Approx;

namespace {

Params params_of(std::initializer_list<std::pair<const std::string, double>> items) {
    return Params(std::map<std::string, double>(items));
}

// plays a policy against generated Bernoulli losses; returns the proposals
void drive(Policy& policy, const FeedbackGraph& g, int rounds, Rng& rng, double mean = 0.4,
           std::vector<std::vector<double>>* proposals = nullptr) {
    for (int t = 0; t < rounds; ++t) {
        const auto& p = policy.propose();
        if (proposals) proposals->push_back(p);
        const int arm = rng.categorical(p);
        std::vector<double> losses(g.num_arms());
        for (double& v : losses) v = rng.bernoulli(mean) ? 1.0 : 0.0;
        policy.update(make_event(g, losses, arm));
    }
}

}  // namespace

TEST_CASE("exp3g defaults: barrier 64K and eta from the alpha hint") {
    const auto g = gbtest::make_clique_graph({{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}}, 10);
    auto policy = make_policy("exp3g", g, 10000, params_of({{"alpha", 4.0}}));
    auto* omd = dynamic_cast<OmdBanditPolicy*>(policy.get());
    REQUIRE(omd != nullptr);
    CHECK(omd->regularizer().barrier_weight(0) == Approx(640.0));         // c = 64K
    CHECK(omd->regularizer().entropy_weight(0) == Approx(1.0 / 0.005));   // eta = 1/sqrt(4*1e4)
}

TEST_CASE("exp3g stays at its start under zero losses") {
    const auto g = gbtest::make_seven_node_graph();
    auto policy = make_policy("exp3g", g, 200, Params());
    const auto start = policy->propose();
    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
        const int arm = rng.categorical(policy->propose());
        policy->update(make_event(g, std::vector<double>(7, 0.0), arm));
    }
    for (int i = 0; i < 7; ++i) CHECK(policy->propose()[i] == Approx(start[i]).margin(1e-8));
}

TEST_CASE("smallloss tuning and regularizer shape") {
    // K = 10, s = 3: eta = min{sqrt((s+1)/L_star), 1/(64K)} = 1/640
    std::vector<std::pair<int, int>> edges{{0, 0}, {1, 1}, {2, 2}};
    for (int j = 3; j < 10; ++j)
        for (int i = 0; i < 10; ++i)
            if (i != j) edges.push_back({i, j});
    FeedbackGraph g(10, edges);
    REQUIRE(classify(g).graph_class == GraphClass::kStronglyObservable);
    auto policy = make_policy("smallloss", g, 20000, params_of({{"oracle_lstar", 100.0}}));
    auto* omd = dynamic_cast<OmdBanditPolicy*>(policy.get());
    REQUIRE(omd != nullptr);
    CHECK(omd->regularizer().barrier_weight(0) == Approx(640.0));  // 1/eta on S
    CHECK(omd->regularizer().entropy_weight(0) == 0.0);
    CHECK(omd->regularizer().entropy_weight(3) == Approx(640.0));  // 1/eta on S-bar
    CHECK(omd->regularizer().barrier_weight(3) == Approx(640.0));  // c = 64K

    CHECK_THROWS_AS(OmdBanditPolicy(g, 20000, 0.01, OmdBanditPolicy::Mode::kSmallLoss, 640.0),
                    std::invalid_argument);  // eta above 1/(64K)

    // self-aware: no entropy terms anywhere
    const auto sa = gbtest::make_clique_graph({{0, 1}}, 2);
    OmdBanditPolicy pure(sa, 1000, 1.0 / 128.0, OmdBanditPolicy::Mode::kSmallLoss, 128.0);
    CHECK(pure.regularizer().entropy_weight(0) == 0.0);
    CHECK(pure.regularizer().entropy_weight(1) == 0.0);
}

TEST_CASE("policies reject graphs outside their class") {
    const auto weakly = gbtest::make_bipartite_graph(2, 2);
    CHECK_THROWS_AS(make_policy("exp3g", weakly, 1000, Params()), std::invalid_argument);
    CHECK_THROWS_AS(make_policy("clique-meta", weakly, 1000, Params()), std::invalid_argument);
    const auto strongly = gbtest::make_seven_node_graph();
    CHECK_THROWS_AS(make_policy("weakly-bipartite", strongly, 1000, Params()), std::invalid_argument);
    CHECK_THROWS_AS(make_policy("weakly-general-adaptive", strongly, 1000, Params()),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_policy("clipped-two-stage", strongly, 1000, Params()),
                    std::invalid_argument);  // not self-aware
    CHECK_THROWS_AS(make_policy("chrome", strongly, 1000, Params()), std::invalid_argument);
}

TEST_CASE("clique-meta: eta_max, thresholds, and rate caps") {
    // T = 1e4, K = 10, beta = 5: eta_max ~= 8.19e-7
    CHECK(clique_meta_eta_max(5, 10, 10000) == Approx(8.19e-7).epsilon(2e-3));
    CHECK(clique_meta_eta_max(5, 10, 10000) ==
          Approx(std::min(1.0 / 320.0, 1.0 / (1000.0 * std::log(1e4) * std::pow(std::log(1e5), 2)))));

    const auto g = gbtest::make_seven_node_graph();
    auto part = greedy_clique_partition(g);
    CHECK_THROWS_AS(CliqueMetaPolicy(g, part, 10000, 1e-3, 64.0 * part.beta),
                    std::invalid_argument);  // above eta_max

    CliqueMetaPolicy policy(g, part, 10000, clique_meta_eta_max(part.beta, 7, 10000),
                            64.0 * part.beta);
    CHECK(policy.clique_rhos() == std::vector<double>{4.0, 4.0});  // 2*kappa

    // sigma^(log2 T) = e^(1/ln 2) ~= 4.23 <= 5, independent of T
    for (long long t : {64LL, 5000LL, 1000000LL}) {
        const double sigma = std::exp(1.0 / std::log(static_cast<double>(t)));
        CHECK(std::pow(sigma, std::log2(static_cast<double>(t))) <= 5.0);
    }
}

TEST_CASE("increasing learning rate rule fires exactly on threshold crossings") {
    std::vector<double> etas{1e-3, 1e-3}, rhos{4.0, 4.0};
    const double sigma = std::exp(1.0 / std::log(1000.0));
    apply_increasing_learning_rates({0.5, 0.3, 0.2}, 2, sigma, etas, rhos);
    CHECK(etas[0] == Approx(1e-3));  // 1/0.5 = 2 < 4: unchanged
    CHECK(etas[1] == Approx(1e-3));  // 1/0.3 ~ 3.3 < 4: unchanged
    apply_increasing_learning_rates({0.1, 0.5, 0.4}, 2, sigma, etas, rhos);
    CHECK(etas[0] == Approx(1e-3 * sigma));  // 1/0.1 = 10 > 4: fires
    CHECK(rhos[0] == Approx(20.0));          // 2/0.1
    CHECK(etas[1] == Approx(1e-3));
    // same distribution again: 10 <= 20, no second firing
    apply_increasing_learning_rates({0.1, 0.5, 0.4}, 2, sigma, etas, rhos);
    CHECK(etas[0] == Approx(1e-3 * sigma));
}

TEST_CASE("clique-meta keeps symmetric rates on symmetric inputs") {
    const auto g = gbtest::make_clique_graph({{0, 1}, {2, 3}}, 4);
    auto part = greedy_clique_partition(g);
    const double eta = clique_meta_eta_max(part.beta, 4, 4096);
    CliqueMetaPolicy policy(g, part, 4096, eta, 64.0 * part.beta);
    Rng rng(11);
    for (int t = 0; t < 60; ++t) {
        const int arm = rng.categorical(policy.propose());
        std::vector<double> losses(4, 0.5);
        policy.update(make_event(g, losses, arm));
    }
    // the meta distribution never leaves [1/4, ...] so no threshold fires
    CHECK(policy.clique_etas() == std::vector<double>{eta, eta});
    for (double v : policy.meta_dist()) CHECK(v == Approx(0.5).margin(1e-6));
}

TEST_CASE("clique-meta proposals are consistent mixtures") {
    const auto g = gbtest::make_seven_node_graph();
    auto part = greedy_clique_partition(g);
    const double eta = clique_meta_eta_max(part.beta, 7, 2048);
    CliqueMetaPolicy policy(g, part, 2048, eta, 64.0 * part.beta);
    Rng rng(17);
    for (int t = 0; t < 80; ++t) {
        const auto& flat = policy.propose();
        double sum = 0.0;
        for (double v : flat) sum += v;
        CHECK(sum == Approx(1.0).margin(1e-9));
        // meta distribution feasibility (floor 1/T)
        for (double v : policy.meta_dist()) CHECK(v >= 1.0 / 2048 - 1e-12);
        // hedge feasibility on their cliques
        for (int j = 0; j < part.kappa; ++j) {
            const auto& hd = policy.hedge_dist(j);
            for (int i = 0; i < 7; ++i) {
                if (part.meta_index[i] == j && g.has_self_loop(i))
                    CHECK(hd[i] >= 1.0 / (part.cliques[j].size() * 2048.0) - 1e-12);
                else
                    CHECK(hd[i] == 0.0);
            }
        }
        const int arm = rng.categorical(flat);
        std::vector<double> losses(7);
        for (double& v : losses) v = rng.uniform();
        policy.update(make_event(g, losses, arm));
    }
}

TEST_CASE("adaptive clique-meta: starting rate formula and reset law") {
    // T = 1e4, K = 10, kappa = 3: eta_1 ~= 4.09e-7
    CHECK(adaptive_clique_meta_eta(3, 10, 10000) == Approx(4.0917e-7).epsilon(1e-3));
    // reset condition: (kappa+1)/eta <= eta * accumulated
    CHECK_FALSE(clique_meta_reset_due(1e-3, 3, 3.9e6));
    CHECK(clique_meta_reset_due(1e-3, 3, 4.1e6));

    const auto g = gbtest::make_clique_graph({{0, 1}, {2, 3}}, 4);
    auto part = greedy_clique_partition(g);
    AdaptiveCliqueMetaPolicy policy(g, part, 1000, adaptive_clique_meta_eta(2, 4, 1000), 64.0 * part.beta);
    const double eta1 = policy.eta();
    Rng rng(23);
    for (int t = 0; t < 50; ++t) {
        const int arm = rng.categorical(policy.propose());
        policy.update(make_event(g, std::vector<double>(4, 0.0), arm));
    }
    // zero losses: the condition never fires, a single epoch runs
    CHECK(policy.current_epoch() == 1);
    CHECK(policy.eta() == Approx(eta1));
}

TEST_CASE("clipped two-stage: initial rates, clipping, epochs, and stage switch") {
    // kappa = 4: eta_init = 1/16, epsilon = 1/8
    const auto g4 = gbtest::make_clique_graph({{0, 1}, {2, 3}, {4, 5}, {6, 7}}, 8);
    auto part4 = greedy_clique_partition(g4);
    ClippedTwoStagePolicy p4(g4, part4, 1 << 10, 4.0);
    CHECK(p4.eta_init() == Approx(1.0 / 16));
    CHECK(p4.epsilon() == Approx(1.0 / 8));
    CHECK(p4.meta_epoch_cap() == 10);  // floor(log2 1024)

    // a clique holding 0.6 > epsilon of the iterate is never clipped
    auto prop = p4.propose();
    double clique0 = prop[0] + prop[1];
    CHECK(clique0 > 0.0);

    // drive with all-ones losses: epochs, meta-epochs, then stage two
    const auto g = gbtest::make_clique_graph({{0, 1}, {2, 3}}, 4);
    auto part = greedy_clique_partition(g);
    ClippedTwoStagePolicy policy(g, part, 64, 2.0);
    Rng rng(31);
    std::vector<double> ones(4, 1.0);
    int max_epoch = 1;
    for (int t = 0; t < 64; ++t) {
        const auto& p = policy.propose();
        double sum = 0.0;
        for (double v : p) sum += v;
        CHECK(sum == Approx(1.0).margin(1e-9));
        const int arm = rng.categorical(p);
        policy.update(make_event(g, ones, arm));
        max_epoch = std::max(max_epoch, policy.current_epoch());
    }
    CHECK(max_epoch > 1);          // the doubling fired
    CHECK(policy.stage() == 2);    // and the meta-epoch budget ran out
}

TEST_CASE("clipped two-stage clips whole cliques of the iterate") {
    const auto g = gbtest::make_clique_graph({{0, 1}, {2, 3}}, 4);
    auto part = greedy_clique_partition(g);
    ClippedTwoStagePolicy policy(g, part, 4096, 2.0);
    Rng rng(37);
    // hammer clique 0 with losses until it is clipped
    for (int t = 0; t < 200; ++t) {
        const auto& p = policy.propose();
        const int arm = rng.categorical(p);
        policy.update(make_event(g, {1.0, 1.0, 0.0, 0.0}, arm));
        if (policy.current_epoch() > 1) break;  // stop before a reset muddies the check
        const auto& sampling = policy.propose();
        const double mass0 = policy.iterate()[0] + policy.iterate()[1];
        if (mass0 <= policy.epsilon()) {
            CHECK(sampling[0] == 0.0);
            CHECK(sampling[1] == 0.0);
            CHECK(sampling[2] + sampling[3] == Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("weakly bipartite tuning from the oracle") {
    const auto g = gbtest::make_bipartite_graph(4, 3);
    auto policy = make_policy("weakly-bipartite", g, 8000, params_of({{"oracle_lis", 1000.0}}));
    auto* weak = dynamic_cast<WeaklyObservablePolicy*>(policy.get());
    REQUIRE(weak != nullptr);
    CHECK(weak->eta() == Approx(std::sqrt(4.0 / 1000.0)).epsilon(1e-12));  // ~0.0632
    CHECK(weak->eta_bar() == Approx(0.01).epsilon(1e-12));                 // 1000^(-2/3)
    CHECK_THROWS_AS(WeaklyObservablePolicy::bipartite(g, 8000, 0.3, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(WeaklyObservablePolicy::bipartite(g, 8000, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("weakly bipartite: zero losses freeze the start point; S-mass floor holds") {
    const auto g = gbtest::make_bipartite_graph(2, 2);
    auto policy = WeaklyObservablePolicy::bipartite(g, 1000, 0.1, 0.04);
    const auto start = policy.propose();
    CHECK(start[0] == Approx(0.25));  // 1/(2s)
    CHECK(start[2] == Approx(0.25));  // 1/(2 s_bar)
    Rng rng(41);
    for (int t = 0; t < 30; ++t) {
        const int arm = rng.categorical(policy.propose());
        policy.update(make_event(g, std::vector<double>(4, 0.0), arm));
    }
    for (int i = 0; i < 4; ++i) CHECK(policy.propose()[i] == Approx(start[i]).margin(1e-8));

    // under real losses the S mass never drops below sqrt(eta_bar)
    for (int t = 0; t < 100; ++t) {
        const int arm = rng.categorical(policy.propose());
        std::vector<double> losses(4);
        for (double& v : losses) v = rng.uniform();
        policy.update(make_event(g, losses, arm));
        const auto& p = policy.propose();
        CHECK(p[0] + p[1] >= std::sqrt(0.04) - 1e-9);
    }
}

TEST_CASE("weakly general: delta tuning, caps, and floor feasibility") {
    // s = d = 2 graph: S = {0,1} observing S-bar = {2,3}
    FeedbackGraph g(4, {{0, 0}, {1, 1}, {0, 2}, {1, 3}});
    REQUIRE(classify(g).graph_class == GraphClass::kWeaklyObservable);
    auto policy = make_policy("weakly-general", g, 8000,
                              params_of({{"oracle_ld", 8000.0}, {"gamma", 1.0 / 3.0}}));
    auto* weak = dynamic_cast<WeaklyObservablePolicy*>(policy.get());
    REQUIRE(weak != nullptr);
    CHECK(weak->delta() == Approx(1.0 / 125.0));  // min{1/125, 1/8, 1/8, 8000^(-1/3)}
    CHECK(weak->eta() == Approx(std::sqrt(1.0 / 8000.0)).epsilon(1e-12));

    const auto dom = greedy_weak_dominating_set(g);
    // eta_bar above delta^(4/3) is rejected: 0.008^(4/3) ~= 1.6e-3
    CHECK_THROWS_AS(WeaklyObservablePolicy::general(g, 8000, dom, 0.008, 0.04, 2e-3),
                    std::invalid_argument);
    CHECK_NOTHROW(WeaklyObservablePolicy::general(g, 8000, dom, 0.008, 0.04, 1.5e-3));

    auto general = WeaklyObservablePolicy::general(g, 8000, dom, 0.008, 0.04, 1.5e-3);
    Rng rng(43);
    for (int t = 0; t < 100; ++t) {
        const int arm = rng.categorical(general.propose());
        std::vector<double> losses(4);
        for (double& v : losses) v = rng.uniform();
        general.update(make_event(g, losses, arm));
        for (int i : dom.members) CHECK(general.propose()[i] >= 0.008 - 1e-9);
    }
}

TEST_CASE("chrome: clip threshold, identity clipping, exact S-mass preservation") {
    const auto g = gbtest::make_bipartite_graph(4, 2);
    ChromePolicy policy(g, 2000, 0.2);
    CHECK(policy.mu() == Approx(0.0107722).epsilon(1e-4));  // 0.2^(5/3) / 4^(4/3)
    // start point: all S coordinates 1/8 >= mu, clipping is the identity
    const auto start = policy.propose();
    for (int i = 0; i < 4; ++i) CHECK(start[i] == Approx(0.125));

    Rng rng(47);
    for (int t = 0; t < 150; ++t) {
        const int arm = rng.categorical(policy.propose());
        std::vector<double> losses(6);
        for (double& v : losses) v = rng.uniform();
        policy.update(make_event(g, losses, arm));
        const auto& p = policy.propose();
        const auto& iterate = policy.iterate();
        double p_mass = 0.0, iterate_mass = 0.0, total = 0.0;
        for (int i = 0; i < 4; ++i) { p_mass += p[i]; iterate_mass += iterate[i]; }
        for (double v : p) total += v;
        CHECK(p_mass == Approx(iterate_mass).margin(1e-12));  // line-9 renormalization
        CHECK(total == Approx(1.0).margin(1e-9));
        for (int i = 4; i < 6; ++i) CHECK(p[i] == Approx(iterate[i]).margin(1e-15));
    }
}

TEST_CASE("chrome halves its rate when the S accumulator crosses") {
    const auto g = gbtest::make_bipartite_graph(2, 2);
    ChromePolicy policy(g, 4000, 0.2);
    const double eta1 = policy.eta();
    Rng rng(53);
    int fired_at = -1;
    for (int t = 0; t < 2000; ++t) {
        const int arm = rng.categorical(policy.propose());
        policy.update(make_event(g, std::vector<double>(4, 1.0), arm));
        if (policy.current_epoch() == 2 && fired_at < 0) {
            fired_at = t;
            CHECK(policy.eta() == Approx(eta1 / 2.0));
        }
    }
    CHECK(fired_at > 0);
}

TEST_CASE("weakly general adaptive: exponents, default delta, and halving") {
    // gamma = 1/2: eta = delta, eta_bar = delta^(3/2)
    FeedbackGraph g(4, {{0, 0}, {1, 1}, {0, 2}, {1, 3}});
    auto dom = greedy_weak_dominating_set(g);
    WeaklyAdaptivePolicy policy(g, 8000, dom, 0.5, 1.0 / 125.0);
    CHECK(policy.eta() == Approx(policy.delta()).epsilon(1e-12));
    CHECK(policy.eta_bar() == Approx(std::pow(policy.delta(), 1.5)).epsilon(1e-12));

    // default delta with d = 40, s = 3 is 1/160
    const auto g2 = gbtest::make_bipartite_graph(3, 2);
    DominatingSet big{std::vector<int>(40, 0), 40};
    CHECK(WeaklyAdaptivePolicy::default_delta(g2, big) == Approx(1.0 / 160.0));

    // all-ones losses push the D accumulator over delta^(-1/gamma) = 125^2
    Rng rng(59);
    int fired_at = -1;
    const double delta1 = policy.delta();
    for (int t = 0; t < 9000 && fired_at < 0; ++t) {
        const int arm = rng.categorical(policy.propose());
        policy.update(make_event(g, std::vector<double>(4, 1.0), arm));
        if (policy.current_epoch() == 2) {
            fired_at = t;
            CHECK(policy.delta() == Approx(delta1 / 2.0));
        }
    }
    CHECK(fired_at > 0);
}

TEST_CASE("full-information hedge policy requires complete feedback") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) edges.push_back({i, j});
    FeedbackGraph full(3, edges);
    auto policy = make_policy("adahedge", full, 100, Params());
    CHECK(policy->propose()[0] == Approx(1.0 / 3));
    CHECK_THROWS_AS(make_policy("adahedge", gbtest::make_seven_node_graph(), 100, Params()),
                    std::invalid_argument);
}

TEST_CASE("every policy proposes feasible distributions on its graph class") {
    Rng rng(61);
    const auto strongly = gbtest::make_seven_node_graph();
    const auto self_aware = gbtest::make_clique_graph({{0, 1, 2}, {3, 4}, {5}}, 6);
    const auto bipartite = gbtest::make_bipartite_graph(3, 3);
    FeedbackGraph general(4, {{0, 0}, {1, 1}, {0, 2}, {1, 3}});

    const std::vector<std::pair<std::string, const FeedbackGraph*>> cases{
        {"exp3g", &strongly},          {"smallloss", &strongly},
        {"clique-meta", &strongly},    {"clique-meta-adaptive", &self_aware},
        {"clipped-two-stage", &self_aware}, {"weakly-bipartite", &bipartite},
        {"chrome", &bipartite},        {"weakly-general", &general},
        {"weakly-general-adaptive", &general},
    };
    for (const auto& [name, graph] : cases) {
        auto policy = make_policy(name, *graph, 600, Params());
        std::vector<std::vector<double>> proposals;
        drive(*policy, *graph, 120, rng, 0.45, &proposals);
        for (const auto& p : proposals) {
            double sum = 0.0;
            for (double v : p) {
                CHECK(v >= -1e-12);
                sum += v;
            }
            CHECK(sum == Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("hedge trajectories inside clique-meta satisfy the adaptive bound") {
    const auto g = gbtest::make_seven_node_graph();
    auto part = greedy_clique_partition(g);
    const long long horizon = 400;
    const double eta = clique_meta_eta_max(part.beta, 7, horizon);
    CliqueMetaPolicy policy(g, part, horizon, eta, 64.0 * part.beta);
    Rng rng(67);
    std::vector<std::vector<double>> fed_losses;
    std::vector<std::vector<std::vector<double>>> dists(part.kappa);
    for (long long t = 0; t < horizon; ++t) {
        for (int j = 0; j < part.kappa; ++j) dists[j].push_back(policy.hedge_dist(j));
        const auto& flat = policy.propose();
        const int arm = rng.categorical(flat);
        std::vector<double> losses(7);
        for (double& v : losses) v = rng.uniform();
        const auto event = make_event(g, losses, arm);
        const auto tilde = clique_estimator(g, part, policy.meta_dist(),
                                            part.meta_index[arm], arm, event);
        fed_losses.push_back(tilde);
        policy.update(event);
    }
    const double log_kt = std::log(7.0 * horizon);
    for (int j = 0; j < part.kappa; ++j) {
        double rho = 1.0;
        for (const auto& tilde : fed_losses)
            for (int i : part.cliques[j]) rho = std::max(rho, tilde[i]);
        double learner = 0.0;
        for (long long t = 0; t < horizon; ++t)
            for (int i : part.cliques[j]) learner += dists[j][t][i] * fed_losses[t][i];
        for (int i : part.cliques[j]) {
            double arm_total = 0.0;
            for (const auto& tilde : fed_losses) arm_total += tilde[i];
            const double bound = 25.0 * rho * log_kt * log_kt +
                                 10.0 * log_kt * std::sqrt(rho * arm_total);
            CHECK(learner - arm_total <= bound + 1e-9);
        }
    }
}
