#include "causeval/causation.hpp"

namespace causeval::causation {

namespace {

struct Frequency {
    std::int64_t hits = 0;
    std::int64_t total = 0;
    double value() const { return static_cast<double>(hits) / static_cast<double>(total); }
};

void check_alignment(const FactualDataset& factual, const InterventionalDataset& iv,
                     const char* which) {
    if (iv.records.size() != factual.records.size())
        throw std::invalid_argument(std::string("interventional dataset (") + which +
                                    ") does not align with the factual dataset");
    for (std::size_t i = 0; i < iv.records.size(); ++i)
        if (iv.records[i].id != factual.records[i].id)
            throw std::invalid_argument(std::string("instance ids of the ") + which +
                                        " dataset do not match the factual dataset");
}

}  // namespace

ContingencyTable contingency(const FactualDataset& factual) {
    if (factual.records.empty())
        throw std::invalid_argument("contingency: empty factual dataset");
    ContingencyTable table;
    for (const auto& record : factual.records) {
        for (const Reading& reading : record.y) {
            if (!reading.has_value()) continue;
            if (record.x)
                (*reading ? table.n11 : table.n10)++;
            else
                (*reading ? table.n01 : table.n00)++;
        }
    }
    return table;
}

CausationEstimate estimate(const FactualDataset& factual, const InterventionalDataset& do_true,
                           const InterventionalDataset& do_false, bool monotone) {
    if (factual.records.empty() || do_true.records.empty() || do_false.records.empty())
        throw std::invalid_argument("estimate: empty dataset");
    if (!do_true.intervention || do_false.intervention)
        throw std::invalid_argument("estimate: intervention values must be do(true), do(false)");
    check_alignment(factual, do_true, "do(true)");
    check_alignment(factual, do_false, "do(false)");

    Frequency y, xy, xprime_yprime;
    for (const auto& record : factual.records) {
        for (const Reading& reading : record.y) {
            if (!reading.has_value()) continue;
            ++y.total;
            ++xy.total;
            ++xprime_yprime.total;
            if (*reading) ++y.hits;
            if (record.x && *reading) ++xy.hits;
            if (!record.x && !*reading) ++xprime_yprime.hits;
        }
    }
    if (y.total == 0) throw std::invalid_argument("estimate: no parseable factual outcomes");

    auto outcome_frequency = [](const InterventionalDataset& dataset) {
        Frequency f;
        for (const auto& record : dataset.records)
            for (const Reading& reading : record.y_do)
                if (reading.has_value()) {
                    ++f.total;
                    if (*reading) ++f.hits;
                }
        if (f.total == 0)
            throw std::invalid_argument("estimate: no parseable interventional outcomes");
        return f;
    };
    Frequency y_do_x = outcome_frequency(do_true);
    Frequency y_do_xprime = outcome_frequency(do_false);

    CausationEstimate out;
    out.p_y = y.value();
    out.p_xy = xy.value();
    out.p_xprime_yprime = xprime_yprime.value();
    out.p_y_do_x = y_do_x.value();
    out.p_y_do_xprime = y_do_xprime.value();
    out.monotone = monotone;

    if (xy.hits == 0)
        throw UndefinedEstimate("PN undefined: P(x,y) = 0 (no instance has both "
                                "treatment and outcome)");
    if (xprime_yprime.hits == 0)
        throw UndefinedEstimate("PS undefined: P(x',y') = 0 (no instance lacks both "
                                "treatment and outcome)");

    out.pn = (out.p_y - out.p_y_do_xprime) / out.p_xy;
    out.ps = (out.p_y_do_x - out.p_y) / out.p_xprime_yprime;
    out.pns = out.p_xy * out.pn + out.p_xprime_yprime * out.ps;
    return out;
}

std::pair<double, double> oracle_pn_ps(const scm::CausalModel& model,
                                       const std::string& treatment,
                                       const std::string& outcome) {
    std::int64_t n_xy = 0, flips_xy = 0;          // x, y observed; does do(x') remove y?
    std::int64_t n_xpyp = 0, produces_xpyp = 0;   // x', y' observed; does do(x) create y?
    const scm::CausalModel forced_true = scm::intervene(model, {treatment, true});
    const scm::CausalModel forced_false = scm::intervene(model, {treatment, false});

    for (const auto& z : scm::enumerate_domain(model)) {
        const scm::Assignment factual = scm::evaluate(model, z);
        const bool x = factual.condition(treatment);
        const bool y = factual.condition(outcome);
        if (x && y) {
            ++n_xy;
            if (!scm::evaluate(forced_false, z).condition(outcome)) ++flips_xy;
        } else if (!x && !y) {
            ++n_xpyp;
            if (scm::evaluate(forced_true, z).condition(outcome)) ++produces_xpyp;
        }
    }
    if (n_xy == 0)
        throw UndefinedEstimate("oracle PN undefined: no unit with treatment and outcome");
    if (n_xpyp == 0)
        throw UndefinedEstimate("oracle PS undefined: no unit with neither treatment "
                                "nor outcome");
    return {static_cast<double>(flips_xy) / static_cast<double>(n_xy),
            static_cast<double>(produces_xpyp) / static_cast<double>(n_xpyp)};
}

DatasetBundle truth_datasets(const scm::CausalModel& model, const std::string& treatment,
                             const std::string& outcome) {
    DatasetBundle bundle;
    bundle.factual.replicates = 1;
    bundle.do_true.intervention = true;
    bundle.do_false.intervention = false;
    const scm::CausalModel forced_true = scm::intervene(model, {treatment, true});
    const scm::CausalModel forced_false = scm::intervene(model, {treatment, false});

    std::int64_t id = 0;
    for (const auto& z : scm::enumerate_domain(model)) {
        const scm::Assignment factual = scm::evaluate(model, z);
        bundle.factual.records.push_back(
            {id, z, factual.condition(treatment), {factual.condition(outcome)}});
        bundle.do_true.records.push_back(
            {id, z, {scm::evaluate(forced_true, z).condition(outcome)}});
        bundle.do_false.records.push_back(
            {id, z, {scm::evaluate(forced_false, z).condition(outcome)}});
        ++id;
    }
    return bundle;
}

}  // namespace causeval::causation
