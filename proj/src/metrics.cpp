#include "causeval/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "causeval/rng.hpp"

namespace causeval::metrics {

namespace {

double sample_std(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

// shared mismatch-rate machinery for the factual and interventional channels
template <typename TruthRecords, typename LlmRecords, typename GetReadings>
RateReport rate_report(const TruthRecords& truth, const LlmRecords& llm, int llm_replicates,
                       GetReadings readings, const char* what) {
    if (truth.size() != llm.size())
        throw std::invalid_argument(std::string(what) + ": datasets have different sizes");

    const int k = llm_replicates;
    std::vector<std::int64_t> mismatches(static_cast<std::size_t>(k), 0);
    std::vector<std::int64_t> counted(static_cast<std::size_t>(k), 0);
    std::int64_t total_mismatch = 0, total = 0;

    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].id != llm[i].id)
            throw std::invalid_argument(std::string(what) + ": instance ids are misaligned");
        const auto& truth_readings = readings(truth[i]);
        if (truth_readings.empty() || !truth_readings.front().has_value())
            throw std::invalid_argument(std::string(what) + ": truth reading is missing");
        const bool expected = *truth_readings.front();

        const auto& answers = readings(llm[i]);
        for (std::size_t r = 0; r < answers.size(); ++r) {
            if (!answers[r].has_value()) continue;  // unparseable: excluded from the rate
            const bool mismatch = *answers[r] != expected;
            ++total;
            total_mismatch += mismatch;
            if (r < static_cast<std::size_t>(k)) {
                ++counted[r];
                mismatches[r] += mismatch;
            }
        }
    }
    if (total == 0)
        throw std::invalid_argument(std::string(what) + ": no parseable answers to rate");

    std::vector<double> per_replicate;
    per_replicate.reserve(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r)
        if (counted[static_cast<std::size_t>(r)] > 0)
            per_replicate.push_back(static_cast<double>(mismatches[static_cast<std::size_t>(r)]) /
                                    static_cast<double>(counted[static_cast<std::size_t>(r)]));

    RateReport report;
    report.rate = static_cast<double>(total_mismatch) / static_cast<double>(total);
    report.standard_error = sample_std(per_replicate) / std::sqrt(static_cast<double>(k));
    report.n = static_cast<int>(truth.size());
    report.k = k;
    return report;
}

}  // namespace

RateReport fir(const causation::FactualDataset& truth, const causation::FactualDataset& llm) {
    return rate_report(truth.records, llm.records, llm.replicates,
                       [](const causation::FactualRecord& r) -> const auto& { return r.y; },
                       "fir");
}

RateReport cir(const causation::InterventionalDataset& truth,
               const causation::InterventionalDataset& llm) {
    if (truth.intervention != llm.intervention)
        throw std::invalid_argument("cir: datasets have different intervention values");
    return rate_report(truth.records, llm.records, llm.replicates,
                       [](const causation::InterventionalRecord& r) -> const auto& { return r.y_do; },
                       "cir");
}

BootstrapDensity bootstrap(const causation::DatasetBundle& llm, int m, std::uint64_t seed,
                           bool monotone) {
    if (m <= 0) throw std::invalid_argument("bootstrap: m must be positive");
    const std::size_t n = llm.factual.records.size();
    if (n == 0) throw std::invalid_argument("bootstrap: empty dataset");

    BootstrapDensity density;
    density.m = m;
    density.seed = seed;
    density.pn.reserve(static_cast<std::size_t>(m));
    density.ps.reserve(static_cast<std::size_t>(m));

    const rng::Stream base = rng::Stream(seed).derive("bootstrap");

    // draw one parseable reading, or nullopt when the instance has none
    auto draw = [](rng::Stream& stream,
                   const std::vector<causation::Reading>& readings) -> causation::Reading {
        std::vector<bool> parseable;
        parseable.reserve(readings.size());
        for (const auto& r : readings)
            if (r.has_value()) parseable.push_back(*r);
        if (parseable.empty()) return std::nullopt;
        if (parseable.size() == 1) return parseable.front();
        return parseable[static_cast<std::size_t>(stream.below(parseable.size()))];
    };

    causation::FactualDataset f;
    causation::InterventionalDataset dt, df;
    f.replicates = 1;
    dt.replicates = df.replicates = 1;
    dt.intervention = true;
    df.intervention = false;
    f.records.resize(n);
    dt.records.resize(n);
    df.records.resize(n);

    for (int iteration = 0; iteration < m; ++iteration) {
        rng::Stream stream = base.derive(static_cast<std::uint64_t>(iteration));
        for (std::size_t i = 0; i < n; ++i) {
            const auto& rf = llm.factual.records[i];
            f.records[i] = {rf.id, {}, rf.x, {draw(stream, rf.y)}};
            const auto& rt = llm.do_true.records[i];
            dt.records[i] = {rt.id, {}, {draw(stream, rt.y_do)}};
            const auto& rb = llm.do_false.records[i];
            df.records[i] = {rb.id, {}, {draw(stream, rb.y_do)}};
        }
        try {
            const causation::CausationEstimate est = causation::estimate(f, dt, df, monotone);
            density.pn.push_back(est.pn);
            density.ps.push_back(est.ps);
        } catch (const causation::UndefinedEstimate&) {
            ++density.dropped;
        }
    }
    return density;
}

std::vector<double> gamma_grid(double step) {
    if (step <= 0 || step > 1) throw std::invalid_argument("gamma grid step must be in (0, 1]");
    const int count = static_cast<int>(std::lround(1.0 / step));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count) + 1);
    for (int i = 0; i <= count; ++i) grid.push_back(static_cast<double>(i) * step);
    return grid;
}

OverlapCurve overlap(const BootstrapDensity& density, double true_pn, double true_ps,
                     const std::vector<double>& grid) {
    if (density.pn.empty()) throw std::invalid_argument("overlap: empty bootstrap density");
    OverlapCurve curve;
    curve.gamma = grid;
    curve.pn_overlap.reserve(grid.size());
    curve.ps_overlap.reserve(grid.size());
    const double denom = static_cast<double>(density.m);
    for (double gamma : grid) {
        std::int64_t pn_in = 0, ps_in = 0;
        for (double v : density.pn)
            if (std::abs(v - true_pn) <= gamma) ++pn_in;
        for (double v : density.ps)
            if (std::abs(v - true_ps) <= gamma) ++ps_in;
        curve.pn_overlap.push_back(static_cast<double>(pn_in) / denom);
        curve.ps_overlap.push_back(static_cast<double>(ps_in) / denom);
    }
    return curve;
}

namespace {

template <typename Record, typename GetReadings>
std::vector<double> element_errors(const std::vector<Record>& truth,
                                   const std::vector<Record>& llm, GetReadings readings,
                                   const char* what) {
    if (truth.size() != llm.size())
        throw std::invalid_argument(std::string(what) + ": datasets have different sizes");
    std::vector<double> out;
    out.reserve(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].id != llm[i].id)
            throw std::invalid_argument(std::string(what) + ": instance ids are misaligned");
        const bool expected = readings(truth[i]).front().value();
        std::int64_t mismatch = 0, counted = 0;
        for (const auto& reading : readings(llm[i])) {
            if (!reading.has_value()) continue;
            ++counted;
            mismatch += *reading != expected;
        }
        out.push_back(counted == 0 ? std::numeric_limits<double>::quiet_NaN()
                                   : static_cast<double>(mismatch) / static_cast<double>(counted));
    }
    return out;
}

}  // namespace

ErrorMatrix element_error_matrix(const causation::DatasetBundle& truth,
                                 const causation::DatasetBundle& llm) {
    ErrorMatrix matrix;
    matrix.factual = element_errors(
        truth.factual.records, llm.factual.records,
        [](const causation::FactualRecord& r) -> const auto& { return r.y; }, "elements");
    matrix.do_true = element_errors(
        truth.do_true.records, llm.do_true.records,
        [](const causation::InterventionalRecord& r) -> const auto& { return r.y_do; },
        "elements");
    matrix.do_false = element_errors(
        truth.do_false.records, llm.do_false.records,
        [](const causation::InterventionalRecord& r) -> const auto& { return r.y_do; },
        "elements");
    return matrix;
}

const std::vector<double>& default_flip_probs() {
    static const std::vector<double> probs = {0.005, 0.001, 0.05, 0.1, 0.2};
    return probs;
}

std::vector<std::pair<double, BootstrapDensity>> noise_sensitivity(
    const problems::Problem& problem, const std::vector<double>& flip_probs, int replicates,
    int m, std::uint64_t seed) {
    for (double p : flip_probs)
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("noise_sensitivity: flip probabilities must be in [0, 1]");
    if (replicates < 1)
        throw std::invalid_argument("noise_sensitivity: replicates must be >= 1");

    const causation::DatasetBundle truth =
        causation::truth_datasets(problem.model, problem.treatment, problem.outcome);
    const bool monotone =
        scm::check_monotonicity(problem.model, problem.treatment, problem.outcome);

    std::vector<std::pair<double, BootstrapDensity>> out;
    out.reserve(flip_probs.size());
    for (std::size_t pi = 0; pi < flip_probs.size(); ++pi) {
        const double p = flip_probs[pi];
        const rng::Stream flip_base =
            rng::Stream(seed).derive("noise-flip").derive(static_cast<std::uint64_t>(pi));

        causation::DatasetBundle noisy;
        noisy.factual = truth.factual;  // untouched, k = 1
        auto perturb = [&](const causation::InterventionalDataset& source,
                           std::uint64_t channel_tag) {
            causation::InterventionalDataset dataset;
            dataset.intervention = source.intervention;
            dataset.replicates = replicates;
            dataset.records.reserve(source.records.size());
            for (const auto& record : source.records) {
                const bool value = record.y_do.front().value();
                std::vector<causation::Reading> readings;
                readings.reserve(static_cast<std::size_t>(replicates));
                rng::Stream stream = flip_base.derive(channel_tag)
                                         .derive(static_cast<std::uint64_t>(record.id));
                for (int r = 0; r < replicates; ++r)
                    readings.push_back(stream.bernoulli(p) ? !value : value);
                dataset.records.push_back({record.id, record.z, std::move(readings)});
            }
            return dataset;
        };
        noisy.do_true = perturb(truth.do_true, 1);
        noisy.do_false = perturb(truth.do_false, 2);

        const std::uint64_t bootstrap_seed =
            rng::Stream(seed).derive("noise-bootstrap").derive(static_cast<std::uint64_t>(pi)).next_u64();
        out.emplace_back(p, bootstrap(noisy, m, bootstrap_seed, monotone));
    }
    return out;
}

}  // namespace causeval::metrics
