#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "causeval/causation.hpp"
#include "causeval/metrics.hpp"

namespace causeval::cli {

inline constexpr int kReportSchemaVersion = 1;

// Self-contained evaluation result: everything needed to re-plot densities,
// overlap curves and element heatmaps lives in this one document.
struct EvaluationReport {
    int schema_version = kReportSchemaVersion;
    std::string problem;
    std::string agent;
    nlohmann::json config_echo;

    causation::CausationEstimate truth;  // from the exact datasets
    double oracle_pn = 0.0;
    double oracle_ps = 0.0;
    bool monotone = false;

    std::optional<causation::CausationEstimate> estimate;  // from agent answers
    std::string estimate_error;  // set when the estimate is undefined

    metrics::RateReport fir;
    metrics::RateReport cir_do_true;
    metrics::RateReport cir_do_false;
    metrics::RateReport cir;  // pooled over both intervention branches

    metrics::BootstrapDensity density;
    metrics::OverlapCurve overlap;
    metrics::ErrorMatrix elements;

    std::int64_t unparseable = 0;
    std::vector<std::int64_t> flagged_instances;
};

nlohmann::json report_to_json(const EvaluationReport& report);
// Rejects documents whose schema_version differs from this build's.
EvaluationReport report_from_json(const nlohmann::json& doc);

void save_report(const std::filesystem::path& path, const EvaluationReport& report);
EvaluationReport load_report(const std::filesystem::path& path);

}  // namespace causeval::cli
