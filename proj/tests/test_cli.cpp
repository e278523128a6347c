#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "causeval/commands.hpp"
#include "causeval/csv.hpp"
#include "causeval/io.hpp"
#include "test_support.hpp"

using namespace causeval;
using cli::RunConfig;

TEST_SUITE_BEGIN("cli");

namespace {

RunConfig base_config(const std::filesystem::path& out, const std::string& problem = "Div6") {
    RunConfig config;
    config.problem = problem;
    config.seed = 7;
    config.out_dir = out;
    return config;
}

}  // namespace

TEST_CASE("config parsing is strict about keys and values") {
    using nlohmann::json;
    const json good = {{"problem", "Div6"}, {"seed", 3}, {"replicates", 4},
                       {"agent", {{"kind", "noisy"}, {"p_cf", 0.1}}}};
    const RunConfig config = cli::config_from_json(good);
    CHECK(config.problem == "Div6");
    CHECK(config.replicates == 4);
    CHECK(config.agent.kind == llm::AgentSpec::Kind::noisy);
    CHECK(config.agent.p_counterfactual == doctest::Approx(0.1));
    config.validate();

    CHECK_THROWS_AS(cli::config_from_json({{"problem", "Div6"}, {"seeds", 3}}),
                    cli::ConfigError);
    CHECK_THROWS_AS(cli::config_from_json({{"problem", "Div6"},
                                           {"agent", {{"kind", "noisy"}, {"pcf", 0.1}}}}),
                    cli::ConfigError);

    RunConfig missing_seed;
    missing_seed.problem = "Div6";
    CHECK_THROWS_AS(missing_seed.validate(), cli::ConfigError);

    RunConfig bad_problem;
    bad_problem.problem = "Div7";
    bad_problem.seed = 1;
    CHECK_THROWS_AS(bad_problem.validate(), cli::ConfigError);

    RunConfig bad_gamma = base_config("out");
    bad_gamma.gamma_step = 0.0;
    CHECK_THROWS_AS(bad_gamma.validate(), cli::ConfigError);

    RunConfig bad_flip = base_config("out");
    bad_flip.flip_probs = {0.5, 1.5};
    CHECK_THROWS_AS(bad_flip.validate(), cli::ConfigError);
}

TEST_CASE("config files load with agent strings and path overrides") {
    test::TempDir dir("config");
    const auto path = dir / "run.json";
    io::write_file(path, R"({
      "problem": "CandyParty",
      "total_candies": 12,
      "agent": "noisy:p_f=0.05,p_cf=0.1",
      "replicates": 3,
      "bootstrap_samples": 50,
      "seed": 11,
      "out_dir": "somewhere",
      "cache_path": "somewhere/c.jsonl"
    })");
    const RunConfig config = cli::load_config(path);
    config.validate();
    CHECK(config.problem == "CandyParty");
    CHECK(config.total_candies == 12);
    CHECK(config.agent.p_factual == doctest::Approx(0.05));
    CHECK(config.bootstrap_samples == 50);
    CHECK(config.cache_file() == std::filesystem::path("somewhere/c.jsonl"));
    CHECK(config.build_problem().name == "CandyParty");
}

TEST_CASE("noisy agents inherit the run seed unless they carry their own") {
    RunConfig config = base_config("out");
    config.agent.kind = llm::AgentSpec::Kind::noisy;
    CHECK(config.effective_agent().seed == 7);
    config.agent.seed = 99;
    CHECK(config.effective_agent().seed == 99);
}

TEST_CASE("dataset files round-trip exactly") {
    test::TempDir dir("datasets");
    const problems::Problem p = problems::lookup("Div6", 24);
    causation::DatasetBundle truth =
        causation::truth_datasets(p.model, p.treatment, p.outcome);

    const auto factual_path = dir / "factual.csv";
    io::write_factual_csv(factual_path, truth.factual, {"N"}, io::scm_extras());
    const causation::FactualDataset factual = io::read_factual_csv(factual_path);
    REQUIRE(factual.records.size() == truth.factual.records.size());
    CHECK(factual.replicates == 1);
    for (std::size_t i = 0; i < factual.records.size(); ++i) {
        CHECK(factual.records[i].id == truth.factual.records[i].id);
        CHECK(factual.records[i].z == truth.factual.records[i].z);
        CHECK(factual.records[i].x == truth.factual.records[i].x);
        CHECK(factual.records[i].y == truth.factual.records[i].y);
    }

    const auto do_path = dir / "do_false.csv";
    io::write_interventional_csv(do_path, truth.do_false, {"N"}, io::scm_extras());
    const causation::InterventionalDataset iv = io::read_interventional_csv(do_path);
    CHECK_FALSE(iv.intervention);
    REQUIRE(iv.records.size() == truth.do_false.records.size());
    for (std::size_t i = 0; i < iv.records.size(); ++i)
        CHECK(iv.records[i].y_do == truth.do_false.records[i].y_do);
}

TEST_CASE("awkward raw answers survive the dataset files") {
    test::TempDir dir("rawtrip");
    causation::FactualDataset dataset;
    dataset.replicates = 2;
    dataset.records.push_back({0, {{"N", 1}}, true, {true, std::nullopt}});
    dataset.records.push_back({1, {{"N", 2}}, false, {false, true}});
    const std::vector<std::string> raws = {"Yes, \"certainly\",\nsee above", "???",
                                           "No.\r\nplain", "ok"};
    auto extras = [&](std::int64_t instance, int replicate) {
        return std::make_pair(raws[static_cast<std::size_t>(instance * 2 + replicate)],
                              std::string("lexical"));
    };
    const auto path = dir / "f.csv";
    io::write_factual_csv(path, dataset, {"N"}, extras);

    const causation::FactualDataset back = io::read_factual_csv(path);
    REQUIRE(back.records.size() == 2);
    CHECK(back.replicates == 2);
    CHECK(back.records[0].y[0] == causation::Reading{true});
    CHECK_FALSE(back.records[0].y[1].has_value());
    CHECK(back.records[1].y == std::vector<causation::Reading>{false, true});

    // the raw text column itself is intact
    const auto rows = csv::parse(io::read_file(path));
    CHECK(rows[1][5] == raws[0]);
    CHECK(rows[3][5] == raws[2]);
}

TEST_CASE("reports round-trip and reject unknown schema versions") {
    test::TempDir dir("report");
    cli::EvaluationReport report;
    report.problem = "Div6";
    report.agent = "perfect";
    report.config_echo = {{"problem", "Div6"}};
    report.truth.pn = 1.0;
    report.truth.ps = 0.5;
    report.oracle_pn = 1.0;
    report.oracle_ps = 0.5;
    report.monotone = true;
    report.estimate = report.truth;
    report.fir = {0.0, 0.0, 400, 10};
    report.cir = report.cir_do_true = report.cir_do_false = report.fir;
    report.density.m = 2;
    report.density.pn = {1.0, 1.0};
    report.density.ps = {0.5, 0.5};
    report.overlap.gamma = {0.0, 1.0};
    report.overlap.pn_overlap = {1.0, 1.0};
    report.overlap.ps_overlap = {1.0, 1.0};
    report.elements.factual = {0.0, std::numeric_limits<double>::quiet_NaN()};
    report.elements.do_true = {0.0, 0.0};
    report.elements.do_false = {0.0, 0.0};

    const auto path = dir / "report.json";
    cli::save_report(path, report);
    const cli::EvaluationReport loaded = cli::load_report(path);
    CHECK(loaded.problem == "Div6");
    CHECK(loaded.truth.pn == 1.0);
    CHECK(loaded.density.pn == report.density.pn);
    CHECK(std::isnan(loaded.elements.factual[1]));
    CHECK(loaded.elements.factual[0] == 0.0);

    nlohmann::json doc = cli::report_to_json(report);
    doc["schema_version"] = 999;
    CHECK_THROWS_AS(cli::report_from_json(doc), std::invalid_argument);
}

TEST_CASE("truth command writes the datasets and ground-truth record") {
    test::TempDir dir("cmdtruth");
    const RunConfig config = base_config(dir.path());
    std::ostringstream log;
    CHECK(cli::cmd_truth(config, log) == 0);

    const cli::OutputPaths paths = cli::output_paths(config);
    const causation::FactualDataset factual = io::read_factual_csv(paths.truth_factual);
    CHECK(factual.records.size() == 400);

    const nlohmann::json record =
        nlohmann::json::parse(io::read_file(paths.truth_estimate));
    CHECK(record.at("pn").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(record.at("ps").get<double>() ==
          doctest::Approx(134.0 / 267.0).epsilon(1e-12));
    CHECK(record.at("monotone").get<bool>());
    CHECK(record.at("instances").get<int>() == 400);
}

TEST_CASE("truth command flags the non-monotone problem in its record") {
    test::TempDir dir("cmdtruthes");
    const RunConfig config = base_config(dir.path(), "EvenSum");
    std::ostringstream log;
    CHECK(cli::cmd_truth(config, log) == 0);
    const nlohmann::json record = nlohmann::json::parse(
        io::read_file(cli::output_paths(config).truth_estimate));
    CHECK(record.at("instances").get<int>() == 512);
    CHECK_FALSE(record.at("monotone").get<bool>());
    CHECK(record.at("pn").get<double>() == doctest::Approx(0.0));
    CHECK(record.at("oracle").at("pn").get<double>() == doctest::Approx(1.0));
    CHECK(log.str().find("not monotone") != std::string::npos);
}

TEST_CASE("evaluate reports carry the non-monotone caveat") {
    test::TempDir dir("cmdevales");
    RunConfig config = base_config(dir.path(), "EvenSum");
    config.range_max = 4;
    config.replicates = 2;
    config.bootstrap_samples = 30;
    std::ostringstream log;
    REQUIRE(cli::cmd_truth(config, log) == 0);
    REQUIRE(cli::cmd_query(config, log) == 0);
    REQUIRE(cli::cmd_evaluate(config, log) == 0);
    const cli::EvaluationReport report =
        cli::load_report(cli::output_paths(config).report);
    CHECK_FALSE(report.monotone);
    CHECK(report.oracle_pn == doctest::Approx(1.0));
    CHECK(report.truth.pn == doctest::Approx(0.0));
    CHECK(log.str().find("non-monotone") != std::string::npos);
}

TEST_CASE("query and evaluate close the loop for a perfect agent") {
    test::TempDir dir("cmdloop");
    RunConfig config = base_config(dir.path());
    config.range_max = 36;
    config.replicates = 3;
    config.bootstrap_samples = 60;

    std::ostringstream log;
    REQUIRE(cli::cmd_truth(config, log) == 0);
    REQUIRE(cli::cmd_query(config, log) == 0);
    REQUIRE(cli::cmd_evaluate(config, log) == 0);

    const cli::OutputPaths paths = cli::output_paths(config);
    const cli::EvaluationReport report = cli::load_report(paths.report);
    CHECK(report.fir.rate == 0.0);
    CHECK(report.cir.rate == 0.0);
    REQUIRE(report.estimate.has_value());
    // self-consistency: the agent estimate reproduces the ground truth exactly
    CHECK(report.estimate->pn == report.truth.pn);
    CHECK(report.estimate->ps == report.truth.ps);
    for (double v : report.overlap.pn_overlap) CHECK(v == 1.0);
    for (double v : report.overlap.ps_overlap) CHECK(v == 1.0);
    for (double v : report.elements.factual) CHECK(v == 0.0);
    CHECK(report.unparseable == 0);

    CHECK(std::filesystem::exists(paths.bootstrap_csv));
    CHECK(std::filesystem::exists(paths.overlap_csv));
    CHECK(std::filesystem::exists(paths.elements_csv));
}

TEST_CASE("evaluate without inputs explains what is missing") {
    test::TempDir dir("cmdmissing");
    const RunConfig config = base_config(dir.path());
    std::ostringstream log;
    CHECK_THROWS_AS(cli::cmd_evaluate(config, log), cli::ConfigError);
}

TEST_CASE("subcommands are idempotent and byte-stable") {
    test::TempDir dir("cmdstable");
    RunConfig config = base_config(dir.path());
    config.range_max = 30;
    config.replicates = 2;
    config.bootstrap_samples = 40;
    config.agent = llm::AgentSpec::parse("noisy:p_f=0.05,p_cf=0.1");

    std::ostringstream log;
    REQUIRE(cli::cmd_truth(config, log) == 0);
    REQUIRE(cli::cmd_query(config, log) == 0);
    REQUIRE(cli::cmd_evaluate(config, log) == 0);

    const cli::OutputPaths paths = cli::output_paths(config);
    const std::string report_once = io::read_file(paths.report);
    const std::string factual_once = io::read_file(paths.query_factual);

    REQUIRE(cli::cmd_truth(config, log) == 0);
    REQUIRE(cli::cmd_query(config, log) == 0);
    REQUIRE(cli::cmd_evaluate(config, log) == 0);
    CHECK(io::read_file(paths.report) == report_once);
    CHECK(io::read_file(paths.query_factual) == factual_once);
}

TEST_CASE("noise command emits one density file per flip probability") {
    test::TempDir dir("cmdnoise");
    RunConfig config = base_config(dir.path());
    config.range_max = 60;
    config.replicates = 4;
    config.bootstrap_samples = 50;
    config.flip_probs = {0.0, 0.1};

    std::ostringstream log;
    REQUIRE(cli::cmd_noise(config, log) == 0);
    const cli::OutputPaths paths = cli::output_paths(config);
    REQUIRE(std::filesystem::exists(paths.noise_csv(0.0)));
    REQUIRE(std::filesystem::exists(paths.noise_csv(0.1)));

    // zero flip probability: a point mass at the exact value
    const auto rows = csv::parse(io::read_file(paths.noise_csv(0.0)));
    REQUIRE(rows.size() == 51);  // header + m
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][1]) == 1.0);
}

TEST_SUITE_END();
