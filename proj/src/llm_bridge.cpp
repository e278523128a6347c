#include "causeval/llm_bridge.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <json.hpp>

#include "causeval/httplib_compat.hpp"

#include "causeval/rng.hpp"
#include "causeval/sha256.hpp"

namespace causeval::llm {

using nlohmann::json;

const char* to_string(PromptKind kind) {
    switch (kind) {
        case PromptKind::factual: return "factual";
        case PromptKind::counterfactual_true: return "counterfactual_true";
        case PromptKind::counterfactual_false: return "counterfactual_false";
    }
    return "?";
}

const char* to_string(ConcretizeMethod method) {
    switch (method) {
        case ConcretizeMethod::lexical: return "lexical";
        case ConcretizeMethod::extractor: return "extractor";
        case ConcretizeMethod::manual: return "manual";
        case ConcretizeMethod::scm: return "scm";
    }
    return "?";
}

ConcretizeMethod concretize_method_from_string(const std::string& s) {
    if (s == "lexical") return ConcretizeMethod::lexical;
    if (s == "extractor") return ConcretizeMethod::extractor;
    if (s == "manual") return ConcretizeMethod::manual;
    if (s == "scm") return ConcretizeMethod::scm;
    throw std::invalid_argument("unknown concretization method: " + s);
}

// ---------------------------------------------------------------------------
// AgentSpec

namespace {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value && *value ? value : fallback;
}

}  // namespace

void AgentSpec::validate() const {
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(p_factual) || !in_unit(p_counterfactual))
        throw std::invalid_argument("agent flip probabilities must lie in [0, 1]");
    if (max_tokens <= 0) throw std::invalid_argument("agent max_tokens must be positive");
    if (max_retries < 1) throw std::invalid_argument("agent max_retries must be >= 1");
    if (max_inflight < 1) throw std::invalid_argument("agent max_inflight must be >= 1");
}

std::string AgentSpec::identity() const {
    switch (kind) {
        case Kind::perfect:
            return "perfect";
        case Kind::noisy:
            return "noisy(p_f=" + format_double(p_factual) +
                   ",p_cf=" + format_double(p_counterfactual) +
                   ",seed=" + std::to_string(seed) + ")";
        case Kind::remote:
            return "remote(model=" + model + ",endpoint=" + endpoint + ",temperature=" +
                   (temperature < 0 ? std::string("default") : format_double(temperature)) + ")";
    }
    return "?";
}

std::string AgentSpec::file_id() const {
    std::string raw;
    switch (kind) {
        case Kind::perfect: raw = "perfect"; break;
        case Kind::noisy:
            raw = "noisy_pf" + format_double(p_factual) + "_pcf" +
                  format_double(p_counterfactual) + "_s" + std::to_string(seed);
            break;
        case Kind::remote: raw = "remote_" + (model.empty() ? "model" : model); break;
    }
    for (char& c : raw)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.' && c != '-')
            c = '-';
    return raw;
}

AgentSpec AgentSpec::parse(const std::string& compact) {
    AgentSpec spec;
    std::string kind = compact;
    std::string rest;
    if (auto colon = compact.find(':'); colon != std::string::npos) {
        kind = compact.substr(0, colon);
        rest = compact.substr(colon + 1);
    }

    if (kind == "perfect") spec.kind = Kind::perfect;
    else if (kind == "noisy") spec.kind = Kind::noisy;
    else if (kind == "remote") spec.kind = Kind::remote;
    else throw std::invalid_argument("unknown agent kind: " + kind);

    std::size_t pos = 0;
    while (pos < rest.size()) {
        std::size_t end = rest.find(',', pos);
        if (end == std::string::npos) end = rest.size();
        std::string item = rest.substr(pos, end - pos);
        pos = end + 1;
        if (item.empty()) continue;
        auto eq_pos = item.find('=');
        if (eq_pos == std::string::npos)
            throw std::invalid_argument("agent option is not key=value: " + item);
        std::string key = item.substr(0, eq_pos);
        std::string value = item.substr(eq_pos + 1);
        if (key == "p_f") spec.p_factual = std::stod(value);
        else if (key == "p_cf") spec.p_counterfactual = std::stod(value);
        else if (key == "seed") spec.seed = std::stoull(value);
        else if (key == "model") spec.model = value;
        else if (key == "endpoint") spec.endpoint = value;
        else if (key == "temperature") spec.temperature = std::stod(value);
        else if (key == "max_tokens") spec.max_tokens = std::stoi(value);
        else throw std::invalid_argument("unknown agent option: " + key);
    }
    spec.validate();
    return spec;
}

AgentSpec resolve_remote_env(AgentSpec spec) {
    if (spec.kind != AgentSpec::Kind::remote) return spec;
    if (spec.endpoint.empty()) spec.endpoint = env_or("CAUSEVAL_ENDPOINT", "");
    if (spec.api_key.empty()) spec.api_key = env_or("CAUSEVAL_API_KEY", "");
    if (spec.model.empty()) spec.model = env_or("CAUSEVAL_MODEL", "");
    return spec;
}

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(std::filesystem::path file) : path_(std::move(file)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ifstream in(path_);
    std::string line;
    std::size_t bad = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            json record = json::parse(line);
            entries_[record.at("key").get<std::string>()] = record.at("raw").get<std::string>();
        } catch (const json::exception&) {
            ++bad;  // typically a line truncated by an interrupted run
        }
    }
    if (bad > 0)
        std::cerr << "cache: skipped " << bad << " unreadable line(s) in " << path_ << "\n";
    out_.open(path_, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open cache file for append: " + path_.string());
}

std::string ResponseCache::make_key(const std::string& agent_identity,
                                    const std::string& prompt, double temperature,
                                    int replicate) {
    std::string material = agent_identity;
    material.push_back('\x1f');
    material += prompt;
    material.push_back('\x1f');
    material += temperature < 0 ? std::string("default") : format_double(temperature);
    material.push_back('\x1f');
    material += std::to_string(replicate);
    return sha256_hex(material);
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::insert(const std::string& key, const std::string& agent_identity,
                           const std::string& prompt, int replicate, const std::string& raw) {
    std::lock_guard lock(mu_);
    if (entries_.count(key)) return;
    entries_[key] = raw;
    json record = {{"key", key},
                   {"agent", agent_identity},
                   {"prompt", prompt},
                   {"replicate", replicate},
                   {"timestamp", static_cast<std::int64_t>(std::chrono::duration_cast<std::chrono::seconds>(
                                     std::chrono::system_clock::now().time_since_epoch())
                                     .count())},
                   {"raw", raw}};
    // replace invalid UTF-8 from the wire instead of refusing to record it
    out_ << record.dump(-1, ' ', false, json::error_handler_t::replace) << "\n";
    out_.flush();
    if (!out_) throw std::runtime_error("cache write failure: " + path_.string());
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

// ---------------------------------------------------------------------------
// Agents

namespace {

class PerfectAgent final : public Agent {
  public:
    std::string answer(const Query& query, int) override {
        return query.scm_truth ? "Yes." : "No.";
    }
};

class NoisyAgent final : public Agent {
  public:
    explicit NoisyAgent(const AgentSpec& spec) : spec_(spec) {}

    std::string answer(const Query& query, int replicate) override {
        const double p = query.kind == PromptKind::factual ? spec_.p_factual
                                                           : spec_.p_counterfactual;
        // seeded per (prompt, replicate): reruns and execution order cannot
        // change the draw
        rng::Stream stream = rng::Stream(spec_.seed)
                                 .derive("noisy-agent")
                                 .derive(rng::fnv1a(query.prompt))
                                 .derive(static_cast<std::uint64_t>(replicate));
        const bool value = stream.bernoulli(p) ? !query.scm_truth : query.scm_truth;
        return value ? "Yes." : "No.";
    }

  private:
    AgentSpec spec_;
};

class RemoteAgent final : public Agent {
  public:
    explicit RemoteAgent(const AgentSpec& spec) : spec_(spec) {}

    std::string answer(const Query& query, int) override {
        if (spec_.endpoint.empty())
            throw RemoteError("remote agent: endpoint not configured (set CAUSEVAL_ENDPOINT)");
        if (spec_.model.empty())
            throw RemoteError("remote agent: model not configured (set CAUSEVAL_MODEL)");

        json body = {{"model", spec_.model},
                     {"messages", json::array({{{"role", "user"}, {"content", query.prompt}}})},
                     {"max_tokens", spec_.max_tokens}};
        if (spec_.temperature >= 0) body["temperature"] = spec_.temperature;
        const std::string payload = body.dump();

        httplib::Headers headers;
        if (!spec_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + spec_.api_key);

        std::string last_error;
        int delay_ms = spec_.retry_initial_ms;
        for (int attempt = 0; attempt < spec_.max_retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
                delay_ms = std::min(delay_ms * 2, 4000);
            }
            auto result = post(payload, headers);
            if (result.first) return *result.first;
            last_error = result.second;
        }
        throw RemoteError("remote agent: request failed after " +
                          std::to_string(spec_.max_retries) + " attempts: " + last_error);
    }

  private:
    // (answer, error): answer set on success
    std::pair<std::optional<std::string>, std::string> post(const std::string& payload,
                                                            const httplib::Headers& headers) {
#ifndef CAUSEVAL_WITH_TLS
        if (spec_.endpoint.rfind("https://", 0) == 0)
            throw RemoteError("remote agent: this build lacks TLS support; use an http:// "
                              "endpoint or rebuild with OpenSSL available");
#endif
        httplib::Client client(spec_.endpoint);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        auto response =
            client.Post("/v1/chat/completions", headers, payload, "application/json");
        if (!response)
            return {std::nullopt, "transport error: " + httplib::to_string(response.error())};
        if (response->status != 200)
            return {std::nullopt,
                    "http status " + std::to_string(response->status) + ": " + response->body};
        try {
            json parsed = json::parse(response->body);
            return {parsed.at("choices").at(0).at("message").at("content").get<std::string>(),
                    ""};
        } catch (const json::exception& e) {
            return {std::nullopt, std::string("malformed response body: ") + e.what()};
        }
    }

    AgentSpec spec_;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const AgentSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case AgentSpec::Kind::perfect: return std::make_unique<PerfectAgent>();
        case AgentSpec::Kind::noisy: return std::make_unique<NoisyAgent>(spec);
        case AgentSpec::Kind::remote: return std::make_unique<RemoteAgent>(spec);
    }
    throw std::invalid_argument("invalid agent kind");
}

std::vector<std::string> ask(Agent& agent, const AgentSpec& spec, const Query& query,
                             int replicates, ResponseCache* cache) {
    if (replicates < 1) throw std::invalid_argument("ask: replicates must be >= 1");
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(replicates));
    const std::string identity = spec.identity();
    for (int r = 0; r < replicates; ++r) {
        if (cache) {
            const std::string key =
                ResponseCache::make_key(identity, query.prompt, spec.temperature, r);
            if (auto hit = cache->lookup(key)) {
                out.push_back(*hit);
                continue;
            }
            std::string raw = agent.answer(query, r);
            cache->insert(key, identity, query.prompt, r, raw);
            out.push_back(std::move(raw));
        } else {
            out.push_back(agent.answer(query, r));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string substitute(std::string text, const std::string& slot, const std::string& value) {
    const std::string token = "{" + slot + "}";
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
    return text;
}

std::string render(const problems::Problem& problem, const problems::PromptTemplate& tmpl,
                   const scm::ExogenousValues& exogenous, std::optional<bool> forced) {
    std::string text = tmpl.text;
    if (forced.has_value())
        text = substitute(std::move(text), "branch",
                          *forced ? tmpl.branch_true : tmpl.branch_false);
    for (const auto& [slot, var] : problem.slot_bindings) {
        auto it = exogenous.find(var);
        if (it == exogenous.end())
            throw std::invalid_argument("render: missing value for slot {" + slot + "} (" +
                                        var + ")");
        text = substitute(std::move(text), slot, std::to_string(it->second));
    }
    for (const auto& [slot, value] : problem.constant_slots)
        text = substitute(std::move(text), slot, value);
    if (auto open = text.find('{'); open != std::string::npos && text.find('}', open) != std::string::npos)
        throw std::invalid_argument("render: unfilled slot in prompt: " +
                                    text.substr(open, text.find('}', open) - open + 1));
    return text;
}

}  // namespace

std::string render_factual(const problems::Problem& problem,
                           const scm::ExogenousValues& exogenous) {
    return render(problem, problem.factual, exogenous, std::nullopt);
}

std::string render_counterfactual(const problems::Problem& problem,
                                  const scm::ExogenousValues& exogenous, bool forced) {
    return render(problem, problem.counterfactual, exogenous, forced);
}

std::string render_extractor_prompt(const std::string& question, const std::string& answer) {
    return "You are an entity extractor expert. I am going to give you a question-answer "
           "pair. I want you to say if the meaning of answer is positive or negative. If "
           "the answer has words like 'Yes' this will make it positive. If the answer "
           "contains words like 'No' this will make it negative. Always answer with only "
           "one word (Positive or Negative). For the question '" +
           question + "' and the answer '" + answer + "' the meaning is";
}

// ---------------------------------------------------------------------------
// Concretization

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// position of the first whole-word, case-insensitive occurrence, or npos
std::size_t find_token(const std::string& haystack, const std::string& token) {
    auto lower = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
    for (std::size_t pos = 0; pos + token.size() <= haystack.size(); ++pos) {
        bool match = true;
        for (std::size_t i = 0; i < token.size(); ++i)
            if (lower(haystack[pos + i]) != lower(token[i])) {
                match = false;
                break;
            }
        if (!match) continue;
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        const std::size_t end = pos + token.size();
        const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
        if (left_ok && right_ok) return pos;
    }
    return std::string::npos;
}

const std::vector<std::string>& affirmative_tokens() {
    static const std::vector<std::string> tokens = {
        "yes", "true", "is divisible", "is even", "will be happy", "can know"};
    return tokens;
}

const std::vector<std::string>& negative_tokens() {
    static const std::vector<std::string> tokens = {"no", "not", "false", "cannot"};
    return tokens;
}

}  // namespace

std::optional<bool> concretize_lexical(const std::string& answer) {
    if (answer.empty()) return std::nullopt;
    std::size_t first_yes = std::string::npos;
    std::size_t first_no = std::string::npos;
    for (const auto& token : affirmative_tokens())
        first_yes = std::min(first_yes, find_token(answer, token));
    for (const auto& token : negative_tokens())
        first_no = std::min(first_no, find_token(answer, token));
    if (first_yes == std::string::npos && first_no == std::string::npos) return std::nullopt;
    return first_yes < first_no;
}

std::optional<bool> concretize_extractor(Agent& extractor, const AgentSpec& extractor_spec,
                                         const std::string& question, const std::string& answer,
                                         ResponseCache* cache) {
    Query query;
    query.prompt = render_extractor_prompt(question, answer);
    query.kind = PromptKind::factual;
    const std::string verdict = ask(extractor, extractor_spec, query, 1, cache).front();

    std::size_t start = verdict.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) return std::nullopt;
    std::string word = verdict.substr(start, 8);
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (word.rfind("positive", 0) == 0) return true;
    if (word.rfind("negative", 0) == 0) return false;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// collect

namespace {

struct InstanceTruth {
    scm::ExogenousValues z;
    bool x = false;
    bool y = false;
    bool y_do_true = false;
    bool y_do_false = false;
};

struct InstanceAnswers {
    std::vector<AnswerRecord> factual, do_true, do_false;
};

}  // namespace

CollectResult collect(const problems::Problem& problem, const AgentSpec& raw_spec,
                      int replicates, ResponseCache* cache, ConcretizeMode mode) {
    if (replicates < 1) throw std::invalid_argument("collect: replicates must be >= 1");
    const AgentSpec spec = resolve_remote_env(raw_spec);
    spec.validate();
    if (mode == ConcretizeMode::extractor && spec.kind != AgentSpec::Kind::remote)
        throw std::invalid_argument(
            "collect: extractor concretization needs a remote agent to extract with");

    const auto domain = scm::enumerate_domain(problem.model);
    const scm::CausalModel forced_true = scm::intervene(problem.model, {problem.treatment, true});
    const scm::CausalModel forced_false =
        scm::intervene(problem.model, {problem.treatment, false});

    std::vector<InstanceTruth> truths(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) {
        const auto& z = domain[i];
        const scm::Assignment assignment = scm::evaluate(problem.model, z);
        truths[i] = {z, assignment.condition(problem.treatment),
                     assignment.condition(problem.outcome),
                     scm::evaluate(forced_true, z).condition(problem.outcome),
                     scm::evaluate(forced_false, z).condition(problem.outcome)};
    }

    std::unique_ptr<Agent> agent = make_agent(spec);

    std::vector<InstanceAnswers> per_instance(domain.size());
    auto run_instance = [&](std::size_t i) {
        const InstanceTruth& truth = truths[i];
        const std::int64_t id = static_cast<std::int64_t>(i);

        auto one_channel = [&](PromptKind kind, const std::string& prompt, bool channel_truth) {
            Query query{prompt, kind, id, channel_truth};
            std::vector<std::string> raws = ask(*agent, spec, query, replicates, cache);
            std::vector<AnswerRecord> records;
            records.reserve(raws.size());
            for (int r = 0; r < static_cast<int>(raws.size()); ++r) {
                AnswerRecord record;
                record.instance = id;
                record.kind = kind;
                record.replicate = r;
                record.raw = raws[static_cast<std::size_t>(r)];
                if (mode == ConcretizeMode::lexical) {
                    record.value = concretize_lexical(record.raw);
                    record.method = ConcretizeMethod::lexical;
                } else {
                    record.value = concretize_extractor(*agent, spec, prompt, record.raw, cache);
                    record.method = ConcretizeMethod::extractor;
                }
                records.push_back(std::move(record));
            }
            return records;
        };

        InstanceAnswers answers;
        answers.factual = one_channel(PromptKind::factual, render_factual(problem, truth.z),
                                      truth.y);
        answers.do_true = one_channel(PromptKind::counterfactual_true,
                                      render_counterfactual(problem, truth.z, true),
                                      truth.y_do_true);
        answers.do_false = one_channel(PromptKind::counterfactual_false,
                                       render_counterfactual(problem, truth.z, false),
                                       truth.y_do_false);
        per_instance[i] = std::move(answers);
    };

    const bool parallel = spec.kind == AgentSpec::Kind::remote && spec.max_inflight > 1 &&
                          domain.size() > 1;
    if (!parallel) {
        for (std::size_t i = 0; i < domain.size(); ++i) run_instance(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= domain.size()) return;
                try {
                    run_instance(i);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> threads;
        const std::size_t n_threads =
            std::min<std::size_t>(static_cast<std::size_t>(spec.max_inflight), domain.size());
        threads.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
        if (failure) std::rethrow_exception(failure);
    }

    // assemble aligned datasets, stable in (instance, kind, replicate) order
    CollectResult result;
    result.data.factual.replicates = replicates;
    result.data.do_true.replicates = replicates;
    result.data.do_false.replicates = replicates;
    result.data.do_true.intervention = true;
    result.data.do_false.intervention = false;

    for (std::size_t i = 0; i < domain.size(); ++i) {
        const InstanceTruth& truth = truths[i];
        const std::int64_t id = static_cast<std::int64_t>(i);
        auto readings = [&](const std::vector<AnswerRecord>& records) {
            std::vector<causation::Reading> out;
            out.reserve(records.size());
            for (const auto& record : records) {
                out.push_back(record.value);
                if (!record.value.has_value()) ++result.unparseable;
            }
            return out;
        };

        const auto& answers = per_instance[i];
        std::vector<causation::Reading> y = readings(answers.factual);
        std::vector<causation::Reading> y_do_true = readings(answers.do_true);
        std::vector<causation::Reading> y_do_false = readings(answers.do_false);

        auto all_unparseable = [](const std::vector<causation::Reading>& rs) {
            return std::none_of(rs.begin(), rs.end(),
                                [](const causation::Reading& r) { return r.has_value(); });
        };
        if (all_unparseable(y) || all_unparseable(y_do_true) || all_unparseable(y_do_false))
            result.flagged_instances.push_back(id);

        result.data.factual.records.push_back({id, truth.z, truth.x, std::move(y)});
        result.data.do_true.records.push_back({id, truth.z, std::move(y_do_true)});
        result.data.do_false.records.push_back({id, truth.z, std::move(y_do_false)});

        for (const auto& record : answers.factual) result.answers.push_back(record);
        for (const auto& record : answers.do_true) result.answers.push_back(record);
        for (const auto& record : answers.do_false) result.answers.push_back(record);
    }
    return result;
}

}  // namespace causeval::llm
