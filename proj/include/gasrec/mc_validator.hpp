#pragma once

#include "gasrec/activity.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gasrec {

/// SplitMix64 used as a counter-based generator: output n of stream `key` is
/// mix(key + (n + 1) * 0x9E3779B97F4A7C15). Seed 0 starts with 0xE220A8397B1DCDAF.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t key = 0) : key_(key) {}

    static std::uint64_t mix(std::uint64_t z);

    std::uint64_t at(std::uint64_t counter) const;
    std::uint64_t next() { return at(counter_++); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    /// Independent stream key for chain `chain` of a run seeded with `seed`.
    static std::uint64_t stream_key(std::uint64_t seed, std::uint64_t chain);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

struct McConfig {
    /// Total steps per chain, burn-in included.
    std::uint64_t steps = 1'000'000;
    std::uint64_t burn_in = 10'000;
    int chains = 1;
    std::uint64_t seed = 0;
    /// Record every `thinning`-th state after burn-in.
    std::uint64_t thinning = 1;
    int histogram_bins = 20;
    int batches = 50;
    int threads = 1;
    /// Optional point-density estimate: mean number of points within
    /// `probe_radius` of `probe`, divided by the volume of that ball in Lambda.
    std::optional<Point> probe;
    double probe_radius = 0.01;
};

/// Throws std::invalid_argument when an invariant fails.
void validate(const McConfig& cfg);

struct ChainResult {
    int chain = 0;
    std::uint64_t stream_key = 0;
    std::uint64_t steps = 0;
    double mean_count = 0.0;
    double mean_count_stderr = 0.0;
    double acceptance_rate = 0.0;
    /// Point counts of the recorded states.
    std::vector<int> counts;
    /// Points per unit length along the first coordinate, per bin.
    std::vector<double> histogram;
    double probe_density = 0.0;
    double probe_density_stderr = 0.0;
};

struct McResult {
    double mean_count = 0.0;
    double mean_count_stderr = 0.0;
    /// Bin edges span the bounding box along the first coordinate.
    double histogram_lo = 0.0;
    double histogram_hi = 0.0;
    std::vector<double> density_histogram;
    double probe_density = 0.0;
    double probe_density_stderr = 0.0;
    std::vector<ChainResult> chains;
};

/// Birth-death Metropolis chains for a real, nonnegative activity field.
McResult run_birth_death(const ActivityField& f, const McConfig& cfg);

/// min(1, lambda |Lambda| exp(-dU) / (n + 1)); `boltzmann` is exp(-dU).
double birth_acceptance(double lambda_x, double volume, std::size_t n, double boltzmann);
/// min(1, n exp(dU) / (lambda |Lambda|)) for removing one of n points whose
/// interaction with the others has Boltzmann factor `boltzmann`.
double death_acceptance(double lambda_x, double volume, std::size_t n, double boltzmann);

/// Flow balance of the acceptance formulas on hand-built 0-, 1- and 2-point
/// configurations (ideal gas, hard-core overlap, gaussian pair).
bool detailed_balance_unit_checks();

struct GoodnessOfFit {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 0.0;
    bool passed = false;
};

/// Chi-square test of `counts` against Poisson(mean); cells with expected
/// count below 5 are pooled into their neighbors.
GoodnessOfFit poisson_goodness_of_fit(std::span<const int> counts, double mean, double alpha = 1e-3);

/// One JSON object per chain: seed, chain, stream_key, steps, burn_in,
/// mean_count, stderr, acceptance_rate.
std::string chains_jsonl(const McResult& r, const McConfig& cfg);

}  // namespace gasrec
