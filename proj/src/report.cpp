#include "causeval/report.hpp"

#include <limits>

#include "causeval/io.hpp"

namespace causeval::cli {

using nlohmann::json;

namespace {

json estimate_to_json(const causation::CausationEstimate& e) {
    return {{"pn", e.pn},
            {"ps", e.ps},
            {"pns", e.pns},
            {"p_y", e.p_y},
            {"p_y_do_x", e.p_y_do_x},
            {"p_y_do_xprime", e.p_y_do_xprime},
            {"p_xy", e.p_xy},
            {"p_xprime_yprime", e.p_xprime_yprime},
            {"monotone", e.monotone}};
}

causation::CausationEstimate estimate_from_json(const json& doc) {
    causation::CausationEstimate e;
    e.pn = doc.at("pn").get<double>();
    e.ps = doc.at("ps").get<double>();
    e.pns = doc.at("pns").get<double>();
    e.p_y = doc.at("p_y").get<double>();
    e.p_y_do_x = doc.at("p_y_do_x").get<double>();
    e.p_y_do_xprime = doc.at("p_y_do_xprime").get<double>();
    e.p_xy = doc.at("p_xy").get<double>();
    e.p_xprime_yprime = doc.at("p_xprime_yprime").get<double>();
    e.monotone = doc.at("monotone").get<bool>();
    return e;
}

json rate_to_json(const metrics::RateReport& r) {
    return {{"rate", r.rate}, {"stderr", r.standard_error}, {"n", r.n}, {"k", r.k}};
}

metrics::RateReport rate_from_json(const json& doc) {
    metrics::RateReport r;
    r.rate = doc.at("rate").get<double>();
    r.standard_error = doc.at("stderr").get<double>();
    r.n = doc.at("n").get<int>();
    r.k = doc.at("k").get<int>();
    return r;
}

// element entries may be null (instance with no parseable reading); NaN
// round-trips through JSON as null
std::vector<double> doubles_or_nan(const json& doc) {
    std::vector<double> out;
    out.reserve(doc.size());
    for (const auto& v : doc)
        out.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                  : v.get<double>());
    return out;
}

}  // namespace

json report_to_json(const EvaluationReport& report) {
    json doc;
    doc["schema_version"] = report.schema_version;
    doc["problem"] = report.problem;
    doc["agent"] = report.agent;
    doc["config"] = report.config_echo;
    doc["truth"] = estimate_to_json(report.truth);
    doc["oracle"] = {{"pn", report.oracle_pn}, {"ps", report.oracle_ps}};
    doc["monotone"] = report.monotone;
    if (report.estimate)
        doc["estimate"] = estimate_to_json(*report.estimate);
    else
        doc["estimate_error"] = report.estimate_error;
    doc["fir"] = rate_to_json(report.fir);
    doc["cir_do_true"] = rate_to_json(report.cir_do_true);
    doc["cir_do_false"] = rate_to_json(report.cir_do_false);
    doc["cir"] = rate_to_json(report.cir);
    doc["bootstrap"] = {{"m", report.density.m},
                        {"seed", report.density.seed},
                        {"dropped", report.density.dropped},
                        {"pn_samples", report.density.pn},
                        {"ps_samples", report.density.ps}};
    doc["overlap"] = {{"gamma", report.overlap.gamma},
                      {"pn", report.overlap.pn_overlap},
                      {"ps", report.overlap.ps_overlap}};
    doc["elements"] = {{"factual", report.elements.factual},
                       {"do_true", report.elements.do_true},
                       {"do_false", report.elements.do_false}};
    doc["unparseable"] = report.unparseable;
    doc["flagged_instances"] = report.flagged_instances;
    return doc;
}

EvaluationReport report_from_json(const json& doc) {
    const int version = doc.at("schema_version").get<int>();
    if (version != kReportSchemaVersion)
        throw std::invalid_argument("report: unknown schema_version " +
                                    std::to_string(version) + " (this build reads " +
                                    std::to_string(kReportSchemaVersion) + ")");
    EvaluationReport report;
    report.schema_version = version;
    report.problem = doc.at("problem").get<std::string>();
    report.agent = doc.at("agent").get<std::string>();
    report.config_echo = doc.at("config");
    report.truth = estimate_from_json(doc.at("truth"));
    report.oracle_pn = doc.at("oracle").at("pn").get<double>();
    report.oracle_ps = doc.at("oracle").at("ps").get<double>();
    report.monotone = doc.at("monotone").get<bool>();
    if (doc.contains("estimate"))
        report.estimate = estimate_from_json(doc.at("estimate"));
    else
        report.estimate_error = doc.at("estimate_error").get<std::string>();
    report.fir = rate_from_json(doc.at("fir"));
    report.cir_do_true = rate_from_json(doc.at("cir_do_true"));
    report.cir_do_false = rate_from_json(doc.at("cir_do_false"));
    report.cir = rate_from_json(doc.at("cir"));
    const json& bootstrap = doc.at("bootstrap");
    report.density.m = bootstrap.at("m").get<int>();
    report.density.seed = bootstrap.at("seed").get<std::uint64_t>();
    report.density.dropped = bootstrap.at("dropped").get<int>();
    report.density.pn = bootstrap.at("pn_samples").get<std::vector<double>>();
    report.density.ps = bootstrap.at("ps_samples").get<std::vector<double>>();
    const json& overlap = doc.at("overlap");
    report.overlap.gamma = overlap.at("gamma").get<std::vector<double>>();
    report.overlap.pn_overlap = overlap.at("pn").get<std::vector<double>>();
    report.overlap.ps_overlap = overlap.at("ps").get<std::vector<double>>();
    const json& elements = doc.at("elements");
    report.elements.factual = doubles_or_nan(elements.at("factual"));
    report.elements.do_true = doubles_or_nan(elements.at("do_true"));
    report.elements.do_false = doubles_or_nan(elements.at("do_false"));
    report.unparseable = doc.at("unparseable").get<std::int64_t>();
    report.flagged_instances = doc.at("flagged_instances").get<std::vector<std::int64_t>>();
    return report;
}

void save_report(const std::filesystem::path& path, const EvaluationReport& report) {
    io::write_file(path, report_to_json(report).dump(2) + "\n");
}

EvaluationReport load_report(const std::filesystem::path& path) {
    return report_from_json(json::parse(io::read_file(path)));
}

}  // namespace causeval::cli
