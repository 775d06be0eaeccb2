#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "xrefchain/types.hpp"

namespace xref {

class Rng;

// i.i.d. Pareto draws with density alpha / h^(1+alpha) on h > 1, via the
// inverse CDF h = u^(-1/alpha). Throws std::invalid_argument on alpha <= 0.
[[nodiscard]] std::vector<double> sample_pareto(double alpha, std::size_t count,
                                                std::uint64_t seed);

// Per-domain hash rates h_ij (domain i, node j).
struct HashRatePopulation {
    std::vector<std::vector<double>> rates;
    double alpha = 2.0;

    [[nodiscard]] std::size_t total_nodes() const;
};

[[nodiscard]] HashRatePopulation sample_population(std::uint32_t domains,
                                                   std::uint32_t nodes_per_domain,
                                                   double alpha, Rng& rng);

enum class FailureMode : std::uint8_t {
    exclude_from_both = 0,  // failed domains vanish from the whole system
    exclude_from_B_only = 1 // single-domain baseline keeps every node
};

[[nodiscard]] const char* to_string(FailureMode mode);

// One trial's measurements. A and A' describe the merged single-domain
// system (max rate, top-X% rate sum); B and B' the partitioned system
// (sum of per-domain maxima, sum of per-domain top-X% sums). R = B/A,
// R' = B'/A'.
struct MonteCarloSample {
    double A = 0.0;
    double A_prime = 0.0;
    double B = 0.0;
    double B_prime = 0.0;
    double R = 0.0;
    double R_prime = 0.0;
};

// Selection counts are ceil(X/100 * group size). Throws
// std::runtime_error("empty system") when every domain failed.
[[nodiscard]] MonteCarloSample compute_sample(const HashRatePopulation& population,
                                              double top_x_percent,
                                              const std::set<DomainId>& failed_domains,
                                              FailureMode mode);

struct McConfig {
    std::uint32_t total_nodes = 10000; // N
    std::uint32_t domains = 10;        // m
    double alpha = 2.0;
    double top_x_percent = 10.0;
    std::uint32_t trials = 1000;
    std::uint32_t failed_domains = 0; // f; drawn uniformly per trial
    FailureMode failure_mode = FailureMode::exclude_from_both;
    std::uint64_t seed = 1;
    double bin_width = 0.1;
    std::uint32_t workers = 1;

    [[nodiscard]] std::vector<std::string> validation_errors() const;
};

struct HistogramBin {
    double left = 0.0;
    std::uint64_t count = 0;
    double density = 0.0; // count / (trials * bin_width)
};

struct Histogram {
    double bin_width = 0.1;
    std::vector<HistogramBin> bins;
};

[[nodiscard]] Histogram build_histogram(const std::vector<double>& values, double bin_width);

struct SeriesStats {
    double mean = 0.0;
    double median = 0.0;
    double variance = 0.0; // sample variance, n-1 denominator
    double mode_bin_left = 0.0;
    double min = 0.0;
    double max = 0.0;
};

[[nodiscard]] SeriesStats series_stats(const std::vector<double>& values, double bin_width);

struct DistributionSummary {
    McConfig config;
    std::vector<MonteCarloSample> samples; // trial order
    Histogram r_histogram;
    Histogram r_prime_histogram;
    SeriesStats r_stats;
    SeriesStats r_prime_stats;
};

// `trials` independent samples. Each trial is seeded from (seed, trial
// index), so results are identical for any worker count. Throws
// std::invalid_argument on invalid config.
[[nodiscard]] DistributionSummary run_monte_carlo(const McConfig& config);

// Per-f summaries with failed domains drawn uniformly at random each trial.
// f = 0 reproduces run_monte_carlo exactly for the same seed.
[[nodiscard]] std::map<std::uint32_t, DistributionSummary> run_failure_sweep(
    const McConfig& config, const std::vector<std::uint32_t>& f_values);

} // namespace xref
