#include "causeval/config.hpp"

#include <set>

#include "causeval/io.hpp"

namespace causeval::cli {

using nlohmann::json;

namespace {

llm::AgentSpec agent_from_json(const json& doc) {
    if (doc.is_string()) return llm::AgentSpec::parse(doc.get<std::string>());
    if (!doc.is_object()) throw ConfigError("config: agent must be a string or an object");

    static const std::set<std::string> known = {"kind",        "p_f",      "p_cf",
                                                "seed",        "model",    "endpoint",
                                                "temperature", "max_tokens", "max_inflight"};
    for (const auto& [key, _] : doc.items())
        if (!known.count(key)) throw ConfigError("config: unknown agent key: " + key);

    llm::AgentSpec spec;
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "perfect") spec.kind = llm::AgentSpec::Kind::perfect;
    else if (kind == "noisy") spec.kind = llm::AgentSpec::Kind::noisy;
    else if (kind == "remote") spec.kind = llm::AgentSpec::Kind::remote;
    else throw ConfigError("config: unknown agent kind: " + kind);

    if (doc.contains("p_f")) spec.p_factual = doc.at("p_f").get<double>();
    if (doc.contains("p_cf")) spec.p_counterfactual = doc.at("p_cf").get<double>();
    if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("model")) spec.model = doc.at("model").get<std::string>();
    if (doc.contains("endpoint")) spec.endpoint = doc.at("endpoint").get<std::string>();
    if (doc.contains("temperature")) spec.temperature = doc.at("temperature").get<double>();
    if (doc.contains("max_tokens")) spec.max_tokens = doc.at("max_tokens").get<int>();
    if (doc.contains("max_inflight")) spec.max_inflight = doc.at("max_inflight").get<int>();
    spec.validate();
    return spec;
}

json agent_to_json(const llm::AgentSpec& spec) {
    json doc;
    switch (spec.kind) {
        case llm::AgentSpec::Kind::perfect: doc["kind"] = "perfect"; break;
        case llm::AgentSpec::Kind::noisy:
            doc["kind"] = "noisy";
            doc["p_f"] = spec.p_factual;
            doc["p_cf"] = spec.p_counterfactual;
            doc["seed"] = spec.seed;
            break;
        case llm::AgentSpec::Kind::remote:
            doc["kind"] = "remote";
            doc["model"] = spec.model;
            doc["endpoint"] = spec.endpoint;
            if (spec.temperature >= 0) doc["temperature"] = spec.temperature;
            doc["max_tokens"] = spec.max_tokens;
            doc["max_inflight"] = spec.max_inflight;
            break;
    }
    return doc;
}

}  // namespace

void RunConfig::validate() const {
    if (problem.empty()) throw ConfigError("config: 'problem' is required");
    const auto names = problems::problem_names();
    if (std::find(names.begin(), names.end(), problem) == names.end())
        throw ConfigError("config: unknown problem: " + problem);
    if (!seed.has_value())
        throw ConfigError("config: 'seed' is required; runs must be reproducible");
    if (replicates < 1) throw ConfigError("config: replicates must be >= 1");
    if (bootstrap_samples < 1) throw ConfigError("config: bootstrap_samples must be >= 1");
    if (gamma_step <= 0 || gamma_step > 1)
        throw ConfigError("config: gamma_step must be in (0, 1]");
    for (double p : flip_probs)
        if (p < 0 || p > 1) throw ConfigError("config: flip_probs must lie in [0, 1]");
    if (out_dir.empty()) throw ConfigError("config: out_dir must be non-empty");
    agent.validate();
}

std::filesystem::path RunConfig::cache_file() const {
    return cache_path.value_or(out_dir / "cache.jsonl");
}

llm::AgentSpec RunConfig::effective_agent() const {
    llm::AgentSpec spec = llm::resolve_remote_env(agent);
    if (spec.kind == llm::AgentSpec::Kind::noisy && spec.seed == 0 && seed.has_value())
        spec.seed = *seed;
    return spec;
}

problems::Problem RunConfig::build_problem() const {
    return problems::lookup(problem, range_max, total_candies);
}

json RunConfig::echo() const {
    json doc;
    doc["problem"] = problem;
    if (range_max) doc["range_max"] = *range_max;
    if (total_candies) doc["total_candies"] = *total_candies;
    doc["agent"] = agent_to_json(effective_agent());
    doc["replicates"] = replicates;
    doc["bootstrap_samples"] = bootstrap_samples;
    doc["seed"] = *seed;
    doc["gamma_step"] = gamma_step;
    doc["flip_probs"] = flip_probs;
    doc["out_dir"] = out_dir.string();
    doc["cache_path"] = cache_file().string();
    doc["concretize"] = concretize == llm::ConcretizeMode::lexical ? "lexical" : "extractor";
    return doc;
}

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    static const std::set<std::string> known = {
        "problem",   "range_max", "total_candies", "agent",    "replicates",
        "bootstrap_samples", "seed", "gamma_step",  "flip_probs", "out_dir",
        "cache_path", "concretize"};
    for (const auto& [key, _] : doc.items())
        if (!known.count(key)) throw ConfigError("config: unknown key: " + key);

    RunConfig config;
    if (doc.contains("problem")) config.problem = doc.at("problem").get<std::string>();
    if (doc.contains("range_max")) config.range_max = doc.at("range_max").get<long>();
    if (doc.contains("total_candies"))
        config.total_candies = doc.at("total_candies").get<long>();
    if (doc.contains("agent")) config.agent = agent_from_json(doc.at("agent"));
    if (doc.contains("replicates")) config.replicates = doc.at("replicates").get<int>();
    if (doc.contains("bootstrap_samples"))
        config.bootstrap_samples = doc.at("bootstrap_samples").get<int>();
    if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("gamma_step")) config.gamma_step = doc.at("gamma_step").get<double>();
    if (doc.contains("flip_probs"))
        config.flip_probs = doc.at("flip_probs").get<std::vector<double>>();
    if (doc.contains("out_dir"))
        config.out_dir = std::filesystem::path(doc.at("out_dir").get<std::string>());
    if (doc.contains("cache_path"))
        config.cache_path = std::filesystem::path(doc.at("cache_path").get<std::string>());
    if (doc.contains("concretize")) {
        const std::string mode = doc.at("concretize").get<std::string>();
        if (mode == "lexical") config.concretize = llm::ConcretizeMode::lexical;
        else if (mode == "extractor") config.concretize = llm::ConcretizeMode::extractor;
        else throw ConfigError("config: concretize must be 'lexical' or 'extractor'");
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("config: cannot parse " + path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

}  // namespace causeval::cli
