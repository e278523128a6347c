#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "causeval/causation.hpp"
#include "causeval/llm_bridge.hpp"
#include "causeval/metrics.hpp"

namespace causeval::io {

// Tabular dataset files. One row per (instance, replicate):
//   factual:        instance,<exogenous...>,x,y,replicate,raw_text,parsed,method
//   interventional: instance,<exogenous...>,do,y_do,replicate,raw_text,parsed,method
// Booleans are 1/0; an unparseable answer leaves the outcome column empty and
// parsed = 0.

// (instance, replicate) -> (raw text, method) for the extra columns; model
// truth uses ("", "scm").
using RowExtras =
    std::function<std::pair<std::string, std::string>(std::int64_t, int)>;

RowExtras scm_extras();
RowExtras answer_extras(const std::vector<llm::AnswerRecord>& answers, llm::PromptKind kind);

void write_factual_csv(const std::filesystem::path& path,
                       const causation::FactualDataset& dataset,
                       const std::vector<std::string>& exogenous_names,
                       const RowExtras& extras);
void write_interventional_csv(const std::filesystem::path& path,
                              const causation::InterventionalDataset& dataset,
                              const std::vector<std::string>& exogenous_names,
                              const RowExtras& extras);

causation::FactualDataset read_factual_csv(const std::filesystem::path& path);
causation::InterventionalDataset read_interventional_csv(const std::filesystem::path& path);

// Plot-ready exports.
void write_bootstrap_csv(const std::filesystem::path& path,
                         const metrics::BootstrapDensity& density);
void write_overlap_csv(const std::filesystem::path& path, const metrics::OverlapCurve& curve);
void write_elements_csv(const std::filesystem::path& path, const metrics::ErrorMatrix& matrix);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Round-trip-exact double formatting shared by every emitter.
std::string format_double(double value);

}  // namespace causeval::io
