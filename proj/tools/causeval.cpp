#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "causeval/commands.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string problem;
    std::string agent;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration file");
    cmd->add_option("--problem", args.problem,
                    "Problem name (Div6, EvenSum, ConPref, CandyParty)");
    cmd->add_option("--agent", args.agent,
                    "Agent spec, e.g. perfect | noisy:p_f=0.1,p_cf=0.2 | remote:model=...");
    cmd->add_option("--seed", args.seed, "Run seed (required here or in the config)");
    cmd->add_option("--out", args.out_dir, "Output directory");
}

causeval::cli::RunConfig resolve(const CommonArgs& args) {
    causeval::cli::RunConfig config;
    if (!args.config_path.empty()) config = causeval::cli::load_config(args.config_path);
    if (!args.problem.empty()) config.problem = args.problem;
    if (!args.agent.empty()) config.agent = causeval::llm::AgentSpec::parse(args.agent);
    if (args.seed) config.seed = *args.seed;
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilities-of-causation reasoning harness"};
    app.require_subcommand(1);

    CommonArgs truth_args, query_args, evaluate_args, noise_args, smoke_args;
    CLI::App* truth = app.add_subcommand(
        "truth", "Generate exact factual/interventional datasets and ground-truth record");
    attach_common(truth, truth_args);
    CLI::App* query =
        app.add_subcommand("query", "Collect agent answers for every instance and prompt");
    attach_common(query, query_args);
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Compare agent answers against the truth datasets and write the report");
    attach_common(evaluate, evaluate_args);
    CLI::App* noise = app.add_subcommand(
        "noise", "Bootstrap densities under randomly flipped counterfactual outcomes");
    attach_common(noise, noise_args);
    CLI::App* smoke = app.add_subcommand(
        "smoke", "Manual live-endpoint check on Div6 over [1, 50] (needs CAUSEVAL_* env)");
    attach_common(smoke, smoke_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (truth->parsed()) return causeval::cli::cmd_truth(resolve(truth_args), std::cout);
        if (query->parsed()) return causeval::cli::cmd_query(resolve(query_args), std::cout);
        if (evaluate->parsed())
            return causeval::cli::cmd_evaluate(resolve(evaluate_args), std::cout);
        if (noise->parsed()) return causeval::cli::cmd_noise(resolve(noise_args), std::cout);
        if (smoke->parsed()) return causeval::cli::cmd_smoke(resolve(smoke_args), std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
