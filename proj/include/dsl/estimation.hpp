#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dsl/phase_space.hpp"

namespace dsl {

struct BinnedDistribution {
    RealVector edges;  // m + 1 ascending, uniform
    RealVector probs;  // m bin masses, each >= 0
    double bin_width = 0.0;
    double covered_mass = 0.0; // sum of probs; < 1 when the range clips tails
};

struct MeasurementRecord {
    RealVector edges;
    std::vector<long long> counts;
    long long shots = 0;
    std::uint64_t seed = 0;
};

struct Posterior {
    RealVector candidates;
    RealVector log_weights; // max-subtracted
    RealVector weights;     // normalized
    double map_estimate = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

// Bin masses by composite Simpson on the sampled density. Edges are snapped
// to the sample grid and each bin must span an even number of grid steps, so
// the requested width is rounded to the nearest feasible one; the result
// records the width actually used. Throws RangeTooNarrow for fewer than
// 2 bins.
BinnedDistribution discretize_pdf(const QuadratureDistribution& dist, double width,
                                  std::pair<double, double> range);

// Deterministic multinomial draw: splitmix-seeded mt19937_64, uniforms
// (rng() >> 11) * 2^-53, inverse-CDF lookup per shot.
MeasurementRecord sample_counts(const BinnedDistribution& binned, long long shots,
                                std::uint64_t seed);

// sum_m counts_m log(max(P_m, 1e-300)); edges must match to 1e-9.
double log_likelihood(const BinnedDistribution& model, const MeasurementRecord& record);

Posterior posterior(const RealVector& candidates, const RealVector& prior,
                    const std::vector<BinnedDistribution>& models,
                    const MeasurementRecord& record);

struct ExperimentConfig {
    int n_experiments = 100;
    long long shots = 1000;
    std::uint64_t seed = 0;
    int n_candidates = 201;      // odd, so the truth sits on the grid
    double half_width_frac = 0.10; // candidate span around the true drive
    double bin_width = 0.1;
    double range_tail = 1e-6;    // model mass allowed outside the bin range
};

struct ExperimentResult {
    std::vector<double> map_estimates;
    double variance = 0.0;  // sample variance of the MAPs
    double qcrb = 0.0;      // 1 / (shots * QFI_whole) at the true point
    double angle = 0.0;     // homodyne angle used
    double qfi_whole = 0.0;
    RealVector candidates;
};

// Repeated-experiment Bayesian estimation of the drive at a fixed operating
// point: homodyne record at the optimal angle, flat prior over a candidate
// grid centered on the truth, one posterior MAP per experiment.
ExperimentResult run_experiments(const ModelParams& params_true, const TruncationSpec& trunc,
                                 const ExperimentConfig& cfg);

// CSV round-trip for measurement records: header "edge_lo,edge_hi,count",
// one row per bin. Import validates uniform, contiguous edges.
void export_record_csv(const MeasurementRecord& record, const std::string& path);
MeasurementRecord import_record_csv(const std::string& path);

// Deterministic per-experiment seed stream (splitmix64 mix of base and index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

} // namespace dsl
