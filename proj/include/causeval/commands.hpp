#pragma once

#include <filesystem>
#include <iosfwd>

#include "causeval/config.hpp"
#include "causeval/report.hpp"

namespace causeval::cli {

// Subcommand bodies. Each is idempotent for a given config, seed and cache,
// writes its outputs under config.out_dir, and returns a process exit code.

// Exact model datasets plus the ground-truth estimate record.
int cmd_truth(const RunConfig& config, std::ostream& log);

// Elicit answers from the configured agent and write the answer datasets;
// responses are served from / appended to the cache, so interrupted runs
// resume without repeating network calls.
int cmd_query(const RunConfig& config, std::ostream& log);

// Compare answer datasets against the truth datasets: estimates,
// inconsistency rates, bootstrap density, overlap curves, element matrix.
int cmd_evaluate(const RunConfig& config, std::ostream& log);

// Counterfactual-noise sensitivity sweep over config.flip_probs.
int cmd_noise(const RunConfig& config, std::ostream& log);

// Manual end-to-end check against a live endpoint (Div6 over [1, 50]).
// Requires CAUSEVAL_ENDPOINT / CAUSEVAL_API_KEY / CAUSEVAL_MODEL; prints the
// measured rates next to reference figures for eyeballing.
int cmd_smoke(const RunConfig& config, std::ostream& log);

// Paths produced by the commands, derived from config (single source of truth
// for tests and consumers).
struct OutputPaths {
    std::filesystem::path truth_factual;
    std::filesystem::path truth_do_true;
    std::filesystem::path truth_do_false;
    std::filesystem::path truth_estimate;
    std::filesystem::path query_factual;
    std::filesystem::path query_do_true;
    std::filesystem::path query_do_false;
    std::filesystem::path report;
    std::filesystem::path bootstrap_csv;
    std::filesystem::path overlap_csv;
    std::filesystem::path elements_csv;
    std::filesystem::path noise_csv(double flip_prob) const;

    std::filesystem::path out_dir;
    std::string problem;
};

OutputPaths output_paths(const RunConfig& config);

}  // namespace causeval::cli
