#include "xrefchain/capacity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace xref {

void validate(const CapacityParams& params) {
    std::string bad;
    if (!(params.tau > 0.0)) bad += "tau must be > 0; ";
    if (!(params.tau_fork >= 0.0)) bad += "tau_fork must be >= 0; ";
    if (!(params.c_txs > 0.0)) bad += "c_txs must be > 0; ";
    if (!bad.empty()) {
        bad.resize(bad.size() - 2);
        throw std::invalid_argument(bad);
    }
}

double fork_probability(const CapacityParams& params) {
    validate(params);
    return 1.0 - std::exp(-params.tau_fork / params.tau);
}

double fork_probability_linear(const CapacityParams& params) {
    validate(params);
    return params.tau_fork / params.tau;
}

double unfork_probability(const CapacityParams& params) {
    validate(params);
    return std::exp(-params.tau_fork / params.tau);
}

double capacity_tps(const CapacityParams& params) {
    validate(params);
    return params.c_txs / params.tau * std::exp(-params.tau_fork / params.tau);
}

double optimal_tau_numeric(const CapacityParams& params) {
    validate(params);
    if (params.tau_fork <= 0.0) {
        throw std::invalid_argument("no interior optimum");
    }
    // G is unimodal with the peak inside (0, inf); bracket it generously.
    double lo = params.tau_fork * 1e-3;
    double hi = params.tau_fork * 1e3;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto g = [&](double tau) {
        CapacityParams p = params;
        p.tau = tau;
        return capacity_tps(p);
    };
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = g(c), gd = g(d);
    while (b - a > 1e-12 * params.tau_fork) {
        if (gc > gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    return (a + b) / 2.0;
}

double optimal_tau(const CapacityParams& params) {
    validate(params);
    if (params.tau_fork <= 0.0) {
        throw std::invalid_argument("no interior optimum");
    }
    const double analytic = params.tau_fork;
    const double numeric = optimal_tau_numeric(params);
    if (std::abs(numeric - analytic) > 1e-6 * analytic) {
        throw std::logic_error("optimal_tau: numeric search disagrees with closed form");
    }
    return analytic;
}

double optimal_capacity_tps(const CapacityParams& params) {
    validate(params);
    if (params.tau_fork <= 0.0) {
        throw std::invalid_argument("no interior optimum");
    }
    return params.c_txs * std::exp(-1.0) / params.tau_fork;
}

double infer_c_from_tps(double tps, double tau, double tau_fork) {
    if (!(tps > 0.0) || !(tau > 0.0) || !(tau_fork >= 0.0)) {
        throw std::invalid_argument("tps and tau must be > 0, tau_fork >= 0");
    }
    return tps * tau * std::exp(tau_fork / tau);
}

double scaled_capacity(const ScalingFactors& factors) {
    if (!(factors.base_tps > 0.0) || !(factors.block_size_ratio > 0.0) ||
        !(factors.interval_ratio > 0.0) || !(factors.domain_count > 0.0)) {
        throw std::invalid_argument("scaling factors must be positive");
    }
    return factors.base_tps * factors.block_size_ratio * factors.interval_ratio *
           factors.domain_count;
}

double fork_adjusted_capacity(double c_txs, double tau, double block_size_mb,
                              double domain_count,
                              const std::function<double(double)>& tau_fork_of_size) {
    CapacityParams params;
    params.c_txs = c_txs;
    params.tau = tau;
    params.block_size_mb = block_size_mb;
    params.tau_fork = tau_fork_of_size ? tau_fork_of_size(block_size_mb) : 0.0;
    return domain_count * capacity_tps(params);
}

} // namespace xref
