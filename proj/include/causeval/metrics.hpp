#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "causeval/causation.hpp"
#include "causeval/problems.hpp"

namespace causeval::metrics {

// Mismatch rate against model truth, pooled over instances and replicates.
// The standard error is the standard deviation of the per-replicate rates
// divided by sqrt(k); it is 0 when k = 1.
struct RateReport {
    double rate = 0.0;
    double standard_error = 0.0;
    int n = 0;  // instances
    int k = 1;  // replicates per instance
};

// Factual inconsistency rate: fraction of parseable answers whose outcome
// disagrees with the model truth.
RateReport fir(const causation::FactualDataset& truth, const causation::FactualDataset& llm);

// Counterfactual inconsistency rate, on interventional datasets with matching
// intervention values.
RateReport cir(const causation::InterventionalDataset& truth,
               const causation::InterventionalDataset& llm);

// PN/PS samples obtained by re-estimating over resampled answers. The
// instance set stays fixed; each iteration draws one parseable reading per
// instance per channel, so agents whose replicates never vary yield a
// point mass and replicate noise is what the density captures. Iterations
// derive their own generator state from (seed, index): parallel or serial
// execution, same output.
struct BootstrapDensity {
    int m = 0;
    std::uint64_t seed = 0;
    int dropped = 0;  // iterations whose estimate was undefined
    std::vector<double> pn;
    std::vector<double> ps;
};

BootstrapDensity bootstrap(const causation::DatasetBundle& llm, int m, std::uint64_t seed,
                           bool monotone);

// 0, step, 2*step, ..., 1.
std::vector<double> gamma_grid(double step = 0.01);

// Fraction of bootstrap estimates within radius gamma of the true value,
// relative to the requested m (dropped iterations count against the curve).
struct OverlapCurve {
    std::vector<double> gamma;
    std::vector<double> pn_overlap;
    std::vector<double> ps_overlap;
};

OverlapCurve overlap(const BootstrapDensity& density, double true_pn, double true_ps,
                     const std::vector<double>& grid);

// Per-instance mismatch fraction over replicates, one row per instance in
// domain enumeration order, for each channel. Instances with no parseable
// reading in a channel hold NaN there.
struct ErrorMatrix {
    std::vector<double> factual;
    std::vector<double> do_true;
    std::vector<double> do_false;
};

ErrorMatrix element_error_matrix(const causation::DatasetBundle& truth,
                                 const causation::DatasetBundle& llm);

// The counterfactual-noise sensitivity experiment: for each flip probability,
// take exact model datasets, flip every counterfactual reading independently
// with that probability (factual channel untouched, k = replicates readings
// per instance), and bootstrap the perturbed data. Returns densities in the
// order the probabilities were given.
std::vector<std::pair<double, BootstrapDensity>> noise_sensitivity(
    const problems::Problem& problem, const std::vector<double>& flip_probs, int replicates,
    int m, std::uint64_t seed);

const std::vector<double>& default_flip_probs();

}  // namespace causeval::metrics
