#pragma once

#include <functional>

namespace xref {

struct CapacityParams {
    double tau = 600.0;       // average block-generation interval, seconds (1/lambda)
    double tau_fork = 12.0;   // block propagation latency, seconds
    double c_txs = 4286.0;    // average transactions per block
    double block_size_mb = 1.0;
};

// Throws std::invalid_argument enumerating the offending fields.
void validate(const CapacityParams& params);

// Exact fork probability 1 - exp(-tau_fork / tau).
[[nodiscard]] double fork_probability(const CapacityParams& params);

// First-order form lambda * tau_fork = tau_fork / tau.
[[nodiscard]] double fork_probability_linear(const CapacityParams& params);

// exp(-tau_fork / tau); complements fork_probability to 1.
[[nodiscard]] double unfork_probability(const CapacityParams& params);

// Transactions per second: G(tau) = (C / tau) * exp(-tau_fork / tau).
[[nodiscard]] double capacity_tps(const CapacityParams& params);

// argmax_tau G(tau) found by golden-section search alone; the analytic
// optimum is not consulted. Serves as the independent check on optimal_tau.
[[nodiscard]] double optimal_tau_numeric(const CapacityParams& params);

// Closed form tau_opt = tau_fork, cross-checked against the numeric search
// (agreement within 1e-6 relative, else std::logic_error). Throws
// std::invalid_argument("no interior optimum") when tau_fork == 0.
[[nodiscard]] double optimal_tau(const CapacityParams& params);

// G at the optimum: C * exp(-1) / tau_fork.
[[nodiscard]] double optimal_capacity_tps(const CapacityParams& params);

// Inverse of capacity_tps in C: C = tps * tau * exp(tau_fork / tau).
[[nodiscard]] double infer_c_from_tps(double tps, double tau, double tau_fork);

struct ScalingFactors {
    double base_tps = 5.0;
    double block_size_ratio = 10.0; // e.g. 10 MB / 1 MB
    double interval_ratio = 5.0;    // e.g. 10 min / 2 min
    double domain_count = 200.0;    // m
};

// Verbatim multiplicative scaling: base * size ratio * interval ratio * m.
// Ignores the fork penalty on purpose; see fork_adjusted_capacity.
[[nodiscard]] double scaled_capacity(const ScalingFactors& factors);

// Extension of the plain scaling: per-domain throughput G(tau) with a
// size-dependent propagation latency, multiplied by the domain count.
[[nodiscard]] double fork_adjusted_capacity(
    double c_txs, double tau, double block_size_mb, double domain_count,
    const std::function<double(double)>& tau_fork_of_size);

} // namespace xref
