#include "xrefchain/tamper_mc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "xrefchain/rng.hpp"

namespace xref {

std::vector<double> sample_pareto(double alpha, std::size_t count, std::uint64_t seed) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be > 0");
    }
    Rng rng(seed);
    std::vector<double> out(count);
    const double exponent = -1.0 / alpha;
    for (double& h : out) {
        h = std::pow(rng.next_open01(), exponent);
    }
    return out;
}

std::size_t HashRatePopulation::total_nodes() const {
    std::size_t n = 0;
    for (const auto& domain : rates) {
        n += domain.size();
    }
    return n;
}

HashRatePopulation sample_population(std::uint32_t domains, std::uint32_t nodes_per_domain,
                                     double alpha, Rng& rng) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be > 0");
    }
    HashRatePopulation population;
    population.alpha = alpha;
    population.rates.resize(domains);
    const double exponent = -1.0 / alpha;
    for (auto& domain : population.rates) {
        domain.resize(nodes_per_domain);
        for (double& h : domain) {
            h = std::pow(rng.next_open01(), exponent);
        }
    }
    return population;
}

const char* to_string(FailureMode mode) {
    return mode == FailureMode::exclude_from_both ? "exclude_from_both"
                                                  : "exclude_from_B_only";
}

namespace {

std::size_t selection_count(double top_x_percent, std::size_t group_size) {
    return static_cast<std::size_t>(
        std::ceil(top_x_percent / 100.0 * static_cast<double>(group_size)));
}

// Sum of the k largest values. Sorts a copy descending so the summation
// order is fixed regardless of how the values were produced.
double top_k_sum(std::vector<double> values, std::size_t k) {
    k = std::min(k, values.size());
    std::sort(values.begin(), values.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sum += values[i];
    }
    return sum;
}

} // namespace

MonteCarloSample compute_sample(const HashRatePopulation& population, double top_x_percent,
                                const std::set<DomainId>& failed_domains, FailureMode mode) {
    const std::size_t m = population.rates.size();
    if (failed_domains.size() >= m) {
        throw std::runtime_error("empty system");
    }
    if (!(top_x_percent > 0.0) || top_x_percent > 100.0) {
        throw std::invalid_argument("top_x_percent must be in (0, 100]");
    }

    const bool exclude_both = mode == FailureMode::exclude_from_both;

    MonteCarloSample sample;
    std::vector<double> merged_for_a;
    for (DomainId i = 0; i < m; ++i) {
        const bool failed = failed_domains.contains(i);
        const std::vector<double>& domain = population.rates[i];
        if (domain.empty()) {
            throw std::invalid_argument("domain without nodes");
        }
        const double domain_max = *std::max_element(domain.begin(), domain.end());
        if (!failed) {
            sample.B += domain_max;
            sample.B_prime +=
                top_k_sum(domain, selection_count(top_x_percent, domain.size()));
        }
        if (!failed || !exclude_both) {
            sample.A = std::max(sample.A, domain_max);
            merged_for_a.insert(merged_for_a.end(), domain.begin(), domain.end());
        }
    }
    const std::size_t merged_count = selection_count(top_x_percent, merged_for_a.size());
    sample.A_prime = top_k_sum(std::move(merged_for_a), merged_count);

    sample.R = sample.B / sample.A;
    sample.R_prime = sample.B_prime / sample.A_prime;
    return sample;
}

std::vector<std::string> McConfig::validation_errors() const {
    std::vector<std::string> errors;
    if (total_nodes < 1) errors.push_back("total_nodes must be >= 1");
    if (domains < 1) errors.push_back("domains must be >= 1");
    if (domains >= 1 && total_nodes % domains != 0) {
        errors.push_back("total_nodes must be divisible by domains");
    }
    if (!(alpha > 0.0)) errors.push_back("alpha must be > 0");
    if (!(top_x_percent > 0.0) || top_x_percent > 100.0) {
        errors.push_back("top_x_percent must be in (0, 100]");
    }
    if (trials < 1) errors.push_back("trials must be >= 1");
    if (failed_domains >= domains) errors.push_back("failed_domains must be < domains");
    if (!(bin_width > 0.0)) errors.push_back("bin_width must be > 0");
    if (workers < 1) errors.push_back("workers must be >= 1");
    return errors;
}

Histogram build_histogram(const std::vector<double>& values, double bin_width) {
    Histogram histogram;
    histogram.bin_width = bin_width;
    if (values.empty()) {
        return histogram;
    }
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const std::int64_t first_bin = static_cast<std::int64_t>(std::floor(*min_it / bin_width));
    const std::int64_t last_bin = static_cast<std::int64_t>(std::floor(*max_it / bin_width));
    histogram.bins.resize(static_cast<std::size_t>(last_bin - first_bin + 1));
    for (std::size_t i = 0; i < histogram.bins.size(); ++i) {
        histogram.bins[i].left = static_cast<double>(first_bin + static_cast<std::int64_t>(i)) *
                                 bin_width;
    }
    for (double v : values) {
        std::int64_t bin = static_cast<std::int64_t>(std::floor(v / bin_width)) - first_bin;
        bin = std::clamp<std::int64_t>(bin, 0,
                                       static_cast<std::int64_t>(histogram.bins.size()) - 1);
        histogram.bins[static_cast<std::size_t>(bin)].count += 1;
    }
    const double norm = static_cast<double>(values.size()) * bin_width;
    for (HistogramBin& bin : histogram.bins) {
        bin.density = static_cast<double>(bin.count) / norm;
    }
    return histogram;
}

SeriesStats series_stats(const std::vector<double>& values, double bin_width) {
    SeriesStats stats;
    if (values.empty()) {
        return stats;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double n = static_cast<double>(values.size());
    stats.mean = sum / n;

    double sq = 0.0;
    for (double v : values) {
        sq += (v - stats.mean) * (v - stats.mean);
    }
    stats.variance = values.size() > 1 ? sq / (n - 1.0) : 0.0;

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    stats.median = sorted.size() % 2 == 1 ? sorted[mid]
                                          : (sorted[mid - 1] + sorted[mid]) / 2.0;
    stats.min = sorted.front();
    stats.max = sorted.back();

    const Histogram histogram = build_histogram(values, bin_width);
    std::uint64_t best = 0;
    for (const HistogramBin& bin : histogram.bins) {
        if (bin.count > best) {
            best = bin.count;
            stats.mode_bin_left = bin.left;
        }
    }
    return stats;
}

namespace {

MonteCarloSample run_trial(const McConfig& config, std::uint32_t f, std::uint32_t trial) {
    Rng rng(derive_seed(config.seed, trial));
    const HashRatePopulation population = sample_population(
        config.domains, config.total_nodes / config.domains, config.alpha, rng);

    // Failed domains are drawn after the rates, so f = 0 leaves the rate
    // stream untouched and sweeps share identical populations per trial.
    std::set<DomainId> failed;
    while (failed.size() < f) {
        failed.insert(static_cast<DomainId>(rng.next_below(config.domains)));
    }
    return compute_sample(population, config.top_x_percent, failed, config.failure_mode);
}

DistributionSummary summarize(const McConfig& config, std::vector<MonteCarloSample> samples) {
    DistributionSummary summary;
    summary.config = config;
    summary.samples = std::move(samples);

    std::vector<double> r_values, r_prime_values;
    r_values.reserve(summary.samples.size());
    r_prime_values.reserve(summary.samples.size());
    for (const MonteCarloSample& s : summary.samples) {
        r_values.push_back(s.R);
        r_prime_values.push_back(s.R_prime);
    }
    summary.r_histogram = build_histogram(r_values, config.bin_width);
    summary.r_prime_histogram = build_histogram(r_prime_values, config.bin_width);
    summary.r_stats = series_stats(r_values, config.bin_width);
    summary.r_prime_stats = series_stats(r_prime_values, config.bin_width);
    return summary;
}

std::vector<MonteCarloSample> run_trials(const McConfig& config, std::uint32_t f) {
    std::vector<MonteCarloSample> samples(config.trials);
    const std::uint32_t workers = std::min(config.workers, config.trials);
    if (workers <= 1) {
        for (std::uint32_t trial = 0; trial < config.trials; ++trial) {
            samples[trial] = run_trial(config, f, trial);
        }
        return samples;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint32_t trial = w; trial < config.trials; trial += workers) {
                samples[trial] = run_trial(config, f, trial);
            }
        });
    }
    for (std::thread& thread : pool) {
        thread.join();
    }
    return samples;
}

void require_valid(const McConfig& config) {
    const std::vector<std::string> errors = config.validation_errors();
    if (!errors.empty()) {
        std::string joined;
        for (const std::string& e : errors) {
            if (!joined.empty()) joined += "; ";
            joined += e;
        }
        throw std::invalid_argument(joined);
    }
}

} // namespace

DistributionSummary run_monte_carlo(const McConfig& config) {
    require_valid(config);
    return summarize(config, run_trials(config, config.failed_domains));
}

std::map<std::uint32_t, DistributionSummary> run_failure_sweep(
    const McConfig& config, const std::vector<std::uint32_t>& f_values) {
    require_valid(config);
    for (std::uint32_t f : f_values) {
        if (f >= config.domains) {
            throw std::invalid_argument("failed_domains must be < domains");
        }
    }
    std::map<std::uint32_t, DistributionSummary> result;
    for (std::uint32_t f : f_values) {
        result.emplace(f, summarize(config, run_trials(config, f)));
    }
    return result;
}

} // namespace xref
