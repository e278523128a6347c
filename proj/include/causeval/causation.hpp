#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "causeval/scm.hpp"

namespace causeval::causation {

// One outcome reading; nullopt marks an answer that could not be concretized.
using Reading = std::optional<bool>;

struct FactualRecord {
    std::int64_t id = 0;
    scm::ExogenousValues z;
    bool x = false;                 // treatment value, always known from the model
    std::vector<Reading> y;         // k outcome readings (k = 1 for model truth)
};

struct FactualDataset {
    int replicates = 1;
    std::vector<FactualRecord> records;
};

struct InterventionalRecord {
    std::int64_t id = 0;
    scm::ExogenousValues z;
    std::vector<Reading> y_do;
};

// Outcomes under do(X = intervention) for the same instances as the paired
// factual dataset, in the same order.
struct InterventionalDataset {
    bool intervention = true;
    int replicates = 1;
    std::vector<InterventionalRecord> records;
};

struct DatasetBundle {
    FactualDataset factual;
    InterventionalDataset do_true;
    InterventionalDataset do_false;
};

struct ContingencyTable {
    std::int64_t n11 = 0;  // x and y
    std::int64_t n10 = 0;  // x and not y
    std::int64_t n01 = 0;  // not x and y
    std::int64_t n00 = 0;  // neither
    std::int64_t total() const { return n11 + n10 + n01 + n00; }
};

// Raised when a probability-of-causation estimate divides by an empty cell.
// This marks a degenerate problem instance, not an internal failure.
class UndefinedEstimate : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CausationEstimate {
    double pn = 0.0;   // (P(y) - P(y|do(x'))) / P(x,y)
    double ps = 0.0;   // (P(y|do(x)) - P(y)) / P(x',y')
    double pns = 0.0;  // P(x,y)*pn + P(x',y')*ps
    double p_y = 0.0;
    double p_y_do_x = 0.0;
    double p_y_do_xprime = 0.0;
    double p_xy = 0.0;
    double p_xprime_yprime = 0.0;
    // identifiability caveat recorded alongside the numbers; never changes the
    // arithmetic
    bool monotone = false;
};

// Counts over all parseable (record, replicate) pairs.
ContingencyTable contingency(const FactualDataset& factual);

// Point estimates of PN, PS and PNS from empirical frequencies. Values are
// returned unclamped: negative or >1 results are diagnostic signals on
// inconsistent inputs. Throws UndefinedEstimate when P(x,y) = 0 or
// P(x',y') = 0.
CausationEstimate estimate(const FactualDataset& factual, const InterventionalDataset& do_true,
                           const InterventionalDataset& do_false, bool monotone);

// PN and PS straight from the counterfactual definitions by exhaustive
// enumeration; independent of the estimate() path and valid without the
// monotonicity assumption. Throws UndefinedEstimate when a conditioning set
// is empty.
std::pair<double, double> oracle_pn_ps(const scm::CausalModel& model,
                                       const std::string& treatment,
                                       const std::string& outcome);

// Exact datasets over the whole admissible domain (k = 1): the factual data
// plus outcomes under both interventions on the treatment node.
DatasetBundle truth_datasets(const scm::CausalModel& model, const std::string& treatment,
                             const std::string& outcome);

}  // namespace causeval::causation
