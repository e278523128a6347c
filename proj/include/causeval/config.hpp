#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causeval/llm_bridge.hpp"
#include "causeval/metrics.hpp"
#include "causeval/problems.hpp"

namespace causeval::cli {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Everything a run needs. The seed is mandatory and never defaulted, so every
// emitted number is reproducible from the config alone.
struct RunConfig {
    std::string problem;
    std::optional<long> range_max;
    std::optional<long> total_candies;
    llm::AgentSpec agent;
    int replicates = 10;
    int bootstrap_samples = 500;
    std::optional<std::uint64_t> seed;
    double gamma_step = 0.01;
    std::vector<double> flip_probs = metrics::default_flip_probs();
    std::filesystem::path out_dir = "out";
    std::optional<std::filesystem::path> cache_path;
    llm::ConcretizeMode concretize = llm::ConcretizeMode::lexical;

    void validate() const;  // throws ConfigError

    std::filesystem::path cache_file() const;
    // agent with the run seed filled in when the spec does not carry its own
    llm::AgentSpec effective_agent() const;
    problems::Problem build_problem() const;
    nlohmann::json echo() const;  // effective configuration, for report embedding
};

// Strict parse: unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace causeval::cli
