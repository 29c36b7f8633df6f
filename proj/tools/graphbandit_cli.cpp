// Command-line front end: run one experiment, sweep a scaling grid, or print
// the structural analysis of a feedback graph.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphbandit/harness.hpp"

namespace {

gbandit::FeedbackGraph load_graph(const std::string& path, bool print_warnings) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::vector<std::string> warnings;
    auto graph = gbandit::parse_graph(buffer.str(), &warnings);
    if (print_warnings)
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return graph;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) seeds.push_back(std::stoull(item));
    }
    if (seeds.empty()) throw std::runtime_error("no seeds given");
    return seeds;
}

gbandit::Params parse_params(const std::vector<std::string>& items) {
    gbandit::Params params;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::runtime_error("expected --param key=value, got " + item);
        params.set(item.substr(0, eq), std::stod(item.substr(eq + 1)));
    }
    return params;
}

void print_graph_info(const gbandit::FeedbackGraph& graph) {
    const auto report = gbandit::classify(graph);
    std::cout << "K: " << graph.num_arms() << '\n'
              << "edges: " << graph.edges().size() << '\n'
              << "class: " << gbandit::to_string(report.graph_class) << '\n'
              << "self_aware: " << (report.is_self_aware ? "yes" : "no") << '\n'
              << "directed_complete_bipartite: "
              << (report.is_directed_complete_bipartite ? "yes" : "no") << '\n'
              << "s: " << graph.s() << "  s_bar: " << graph.s_bar() << '\n';
    std::cout << "per_node:";
    for (int i = 0; i < graph.num_arms(); ++i)
        std::cout << ' ' << i << '=' << gbandit::to_string(report.per_node[i]);
    std::cout << '\n';
    const auto part = gbandit::greedy_clique_partition(graph);
    std::cout << "greedy_kappa: " << part.kappa << "  beta: " << part.beta << '\n';
    for (int j = 0; j < part.kappa; ++j) {
        std::cout << "  clique " << j << ":";
        for (int arm : part.cliques[j]) std::cout << ' ' << arm;
        std::cout << '\n';
    }
    const auto indep = gbandit::greedy_independent_set(graph);
    std::cout << "greedy_alpha: " << indep.size() << "  (";
    for (std::size_t i = 0; i < indep.size(); ++i) std::cout << (i ? " " : "") << indep[i];
    std::cout << ")\n";
    if (report.graph_class == gbandit::GraphClass::kWeaklyObservable) {
        const auto dom = gbandit::greedy_weak_dominating_set(graph);
        std::cout << "greedy_d: " << dom.d << "  (";
        for (std::size_t i = 0; i < dom.members.size(); ++i)
            std::cout << (i ? " " : "") << dom.members[i];
        std::cout << ")\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversarial bandits with graph feedback"};
    app.require_subcommand(1);

    std::string graph_path, algo, env_text = "stochastic:", out_dir, trace_mode = "summary";
    std::string seeds_text = "1";
    long long horizon = 1000;
    int threads = 0;
    std::vector<std::string> param_items;

    auto* run = app.add_subcommand("run", "run one experiment over a list of seeds");
    run->add_option("--graph", graph_path, "graph file")->required();
    run->add_option("--algo", algo, "policy name")->required();
    run->add_option("--T", horizon, "number of rounds")->required();
    run->add_option("--seeds", seeds_text, "comma-separated seed list");
    run->add_option("--env", env_text, "environment spec (file:PATH | stochastic:... | shifted:... | lower_bound_a:... | lower_bound_b:...)");
    run->add_option("--param", param_items, "policy parameter key=value");
    run->add_option("--out", out_dir, "output directory for CSV reports");
    run->add_option("--trace", trace_mode, "summary | per-round");
    run->add_option("--threads", threads, "worker threads (0 = auto)");

    std::string grid_text;
    auto* scaling = app.add_subcommand("scaling", "sweep T or mu_star and report regret scaling");
    scaling->add_option("--graph", graph_path, "graph file")->required();
    scaling->add_option("--algo", algo, "policy name")->required();
    scaling->add_option("--T", horizon, "base horizon")->required();
    scaling->add_option("--grid", grid_text, "key=v1,v2,... with key T or mu_star")->required();
    scaling->add_option("--seeds", seeds_text, "comma-separated seed list");
    scaling->add_option("--env", env_text, "environment spec");
    scaling->add_option("--param", param_items, "policy parameter key=value");
    scaling->add_option("--out", out_dir, "output directory");
    scaling->add_option("--threads", threads, "worker threads (0 = auto)");

    auto* info = app.add_subcommand("graph-info", "print observability and greedy structures");
    info->add_option("--graph", graph_path, "graph file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (info->parsed()) {
            print_graph_info(load_graph(graph_path, true));
            return 0;
        }
        gbandit::ExperimentConfig config{load_graph(graph_path, true)};
        config.algo = algo;
        config.horizon = horizon;
        config.params = parse_params(param_items);
        config.seeds = parse_seeds(seeds_text);
        config.env = gbandit::EnvSpec::parse(env_text);
        config.out_dir = out_dir;
        config.per_round_trace = (trace_mode == "per-round");
        config.threads = threads;
        if (trace_mode != "per-round" && trace_mode != "summary")
            throw std::runtime_error("--trace must be per-round or summary");

        if (run->parsed()) {
            const auto result = gbandit::run_experiment(config);
            std::cout << result.summary_csv();
            std::cout << "mean_regret: " << result.mean_regret
                      << "  std_regret: " << result.std_regret
                      << "  mean_L_star: " << result.mean_l_star << '\n';
            return 0;
        }
        const auto eq = grid_text.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--grid must be key=v1,v2,...");
        const std::string key = grid_text.substr(0, eq);
        std::vector<double> values;
        std::istringstream vin(grid_text.substr(eq + 1));
        std::string item;
        while (std::getline(vin, item, ',')) values.push_back(std::stod(item));
        const auto rows = gbandit::scaling_suite(config, key, values);
        std::cout << "grid_value,mean_L_star,mean_regret,slope_vs_previous\n";
        for (const auto& row : rows)
            std::cout << row.grid_value << ',' << row.mean_l_star << ',' << row.mean_regret << ','
                      << row.slope_vs_previous << '\n';
        return 0;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
