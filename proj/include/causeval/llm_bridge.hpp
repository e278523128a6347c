#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "causeval/causation.hpp"
#include "causeval/problems.hpp"

namespace causeval::llm {

enum class PromptKind { factual, counterfactual_true, counterfactual_false };

const char* to_string(PromptKind kind);

// How a free-text answer was mapped to a boolean.
enum class ConcretizeMethod { lexical, extractor, manual, scm };

const char* to_string(ConcretizeMethod method);
ConcretizeMethod concretize_method_from_string(const std::string& s);

enum class ConcretizeMode { lexical, extractor };

class RemoteError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct AgentSpec {
    enum class Kind { perfect, noisy, remote };
    Kind kind = Kind::perfect;

    // noisy: per-prompt-kind flip probabilities against the model truth
    double p_factual = 0.0;
    double p_counterfactual = 0.0;
    std::uint64_t seed = 0;

    // remote chat-completion endpoint; endpoint/api_key/model fall back to the
    // CAUSEVAL_ENDPOINT / CAUSEVAL_API_KEY / CAUSEVAL_MODEL environment variables
    std::string endpoint;
    std::string api_key;
    std::string model;
    double temperature = -1.0;  // < 0: leave the endpoint default
    int max_tokens = 256;
    int max_retries = 4;
    int retry_initial_ms = 250;
    int max_inflight = 4;

    void validate() const;
    // stable description used in cache keys and reports
    std::string identity() const;
    // filesystem-safe variant for output file names
    std::string file_id() const;

    // compact form: "perfect", "noisy:p_f=0.1,p_cf=0.2,seed=7",
    // "remote:model=gpt-4,temperature=0.7"
    static AgentSpec parse(const std::string& compact);
};

// Fills empty remote fields from CAUSEVAL_ENDPOINT / CAUSEVAL_API_KEY /
// CAUSEVAL_MODEL; mock specs pass through unchanged.
AgentSpec resolve_remote_env(AgentSpec spec);

// Append-only store of raw responses keyed by a content hash of
// (agent identity, prompt, temperature, replicate index). A hit returns the
// identical raw text and bypasses the network, which makes interrupted runs
// resumable and repeated runs free.
class ResponseCache {
  public:
    explicit ResponseCache(std::filesystem::path file);

    static std::string make_key(const std::string& agent_identity, const std::string& prompt,
                                double temperature, int replicate);

    std::optional<std::string> lookup(const std::string& key) const;
    void insert(const std::string& key, const std::string& agent_identity,
                const std::string& prompt, int replicate, const std::string& raw);
    std::size_t size() const;
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    std::unordered_map<std::string, std::string> entries_;
    std::ofstream out_;
    mutable std::mutex mu_;
};

// One prompt to be answered. scm_truth carries the model-computed answer for
// the mock agents; the remote agent ignores it.
struct Query {
    std::string prompt;
    PromptKind kind = PromptKind::factual;
    std::int64_t instance = 0;
    bool scm_truth = false;
};

class Agent {
  public:
    virtual ~Agent() = default;
    virtual std::string answer(const Query& query, int replicate) = 0;
};

std::unique_ptr<Agent> make_agent(const AgentSpec& spec);

// `replicates` raw answers for one query. The cache is consulted per
// replicate index before the agent is invoked; fresh answers are appended.
std::vector<std::string> ask(Agent& agent, const AgentSpec& spec, const Query& query,
                             int replicates, ResponseCache* cache);

// Prompt rendering from the problem templates. Distinct exogenous instances
// always produce distinct text because every instance value appears verbatim.
std::string render_factual(const problems::Problem& problem,
                           const scm::ExogenousValues& exogenous);
std::string render_counterfactual(const problems::Problem& problem,
                                  const scm::ExogenousValues& exogenous, bool forced);
std::string render_extractor_prompt(const std::string& question, const std::string& answer);

// Case-insensitive token scan on word boundaries: the earliest affirmative or
// negative token decides; no token means the answer is unparseable.
std::optional<bool> concretize_lexical(const std::string& answer);

// Extractor mode routes the question/answer pair through a remote agent and
// maps its one-word verdict. Only remote agents can serve as extractors.
std::optional<bool> concretize_extractor(Agent& extractor, const AgentSpec& extractor_spec,
                                         const std::string& question, const std::string& answer,
                                         ResponseCache* cache);

struct AnswerRecord {
    std::int64_t instance = 0;
    PromptKind kind = PromptKind::factual;
    int replicate = 0;
    std::string raw;
    std::optional<bool> value;
    ConcretizeMethod method = ConcretizeMethod::lexical;
};

struct CollectResult {
    causation::DatasetBundle data;
    std::vector<AnswerRecord> answers;  // ordered by (instance, kind, replicate)
    std::int64_t unparseable = 0;
    // instances whose replicates were all unparseable in some channel
    std::vector<std::int64_t> flagged_instances;
};

// Full elicitation sweep: renders the factual prompt and both counterfactual
// prompts for every admissible instance, asks the agent with `replicates`
// samples each, concretizes, and assembles aligned datasets. Treatment values
// in the factual dataset come from the model, not from answers. Remote
// queries run on up to spec.max_inflight threads; results are
// order-stabilized regardless of completion order.
CollectResult collect(const problems::Problem& problem, const AgentSpec& spec, int replicates,
                      ResponseCache* cache, ConcretizeMode mode = ConcretizeMode::lexical);

}  // namespace causeval::llm
