#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "policy.hpp"

namespace aoi {

struct SimConfig {
    std::string experiment = "custom";
    std::vector<ClientParams> clients;
    std::uint64_t horizon = 100'000;
    std::uint64_t warmup = 10'000;
    std::uint64_t seed = 1;
    PolicySpec policy;
    std::uint32_t replications = 1;

    /// Throws Error(invalid_argument) on empty clients, warmup >= horizon,
    /// horizon above kMaxHorizon, or zero replications.
    void validate() const;
    std::vector<double> success_probs() const;
};

struct SimResult {
    std::vector<double> per_client_avg_aoi;
    double network_avg_aoi = 0.0;
    double replication_mean = 0.0;
    double replication_stderr = 0.0;
    std::uint64_t slots_simulated = 0;
    /// Successful deliveries per client (totals over all replications).
    std::vector<std::uint64_t> deliveries;
};

/// Combines replications: per-client means, mean and standard error of the
/// network average. A single run is returned unchanged.
SimResult aggregate(std::span<const SimResult> runs);

/// Default warm-up: 10% of the horizon.
std::uint64_t default_warmup(std::uint64_t horizon) noexcept;

/// Solves the joint table for optimal-table configs that do not carry one.
void prepare_policy(SimConfig& cfg);

/// One replication. Every client starts at (a=1, A=1); AoI is accumulated at the
/// start of each slot t > warmup, before the decision.
SimResult run(const SimConfig& cfg, std::uint32_t replication_id);

/// Replications 1..R, executed on up to `threads` threads; the reduction is in
/// replication order so results do not depend on the thread count.
SimResult replicate(const SimConfig& cfg, unsigned threads = 1);

/// Thread count from AOI_THREADS, else hardware concurrency.
unsigned default_threads();

}  // namespace aoi
