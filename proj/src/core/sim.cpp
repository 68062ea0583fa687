#include "sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "error.hpp"

namespace aoi {

void SimConfig::validate() const {
    if (clients.empty()) fail(ErrorCode::invalid_argument, "simulation needs at least one client");
    if (horizon == 0) fail(ErrorCode::invalid_argument, "horizon must be positive");
    if (horizon > kMaxHorizon)
        fail(ErrorCode::invalid_argument, "horizon " + std::to_string(horizon) + " exceeds the supported maximum of " +
                                              std::to_string(kMaxHorizon) + " slots");
    if (warmup >= horizon) fail(ErrorCode::invalid_argument, "warmup must be smaller than horizon");
    if (replications == 0) fail(ErrorCode::invalid_argument, "replications must be >= 1");
    if (policy.kind == PolicyKind::optimal_table && clients.size() > 2)
        fail(ErrorCode::invalid_argument, "optimal-table supports at most 2 clients");
}

std::vector<double> SimConfig::success_probs() const {
    std::vector<double> ps;
    ps.reserve(clients.size());
    for (const auto& c : clients) ps.push_back(c.p());
    return ps;
}

std::uint64_t default_warmup(std::uint64_t horizon) noexcept {
    return horizon / 10;
}

void prepare_policy(SimConfig& cfg) {
    if (cfg.policy.kind != PolicyKind::optimal_table || cfg.policy.table) return;
    const auto sol = solve_joint_optimal(JointProblem(cfg.clients, cfg.policy.age_cap));
    cfg.policy.table = std::make_shared<const JointPolicyTable>(sol.policy);
}

SimResult run(const SimConfig& cfg_in, std::uint32_t replication_id) {
    cfg_in.validate();
    SimConfig cfg = cfg_in;
    prepare_policy(cfg);

    const std::size_t n = cfg.clients.size();
    std::vector<ClientState> states(n);
    std::vector<ClientStreams> streams;
    streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) streams.push_back(ClientStreams::make(cfg.seed, replication_id, i));
    auto policy = make_policy(cfg.policy, cfg.seed, replication_id);

    // Ages are integers: exact accumulation in 64 bits (A <= 1e9, slots <= 1e9).
    std::vector<std::uint64_t> age_sums(n, 0);
    std::vector<std::uint64_t> deliveries(n, 0);

    for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        if (t > cfg.warmup)
            for (std::size_t i = 0; i < n; ++i) age_sums[i] += static_cast<std::uint64_t>(states[i].age());

        const NetworkState ns{states, cfg.clients, t};
        const auto decision = policy->decide(ns);
        if (decision.client && *decision.client >= n)
            fail(ErrorCode::internal, "policy scheduled a client out of range");

        for (std::size_t i = 0; i < n; ++i) {
            const bool scheduled = decision.client == i;
            SlotOutcome o;
            o.arrival = streams[i].arrival.bernoulli(cfg.clients[i].lambda(), t);
            o.channel = scheduled && streams[i].channel.bernoulli(cfg.clients[i].p(), t);
            if (o.channel) ++deliveries[i];
            states[i] = step_client(states[i], scheduled, o);
        }
    }

    SimResult r;
    const double measured = static_cast<double>(cfg.horizon - cfg.warmup);
    r.per_client_avg_aoi.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.per_client_avg_aoi[i] = static_cast<double>(age_sums[i]) / measured;
        total += r.per_client_avg_aoi[i];
    }
    r.network_avg_aoi = total / static_cast<double>(n);
    r.replication_mean = r.network_avg_aoi;
    r.replication_stderr = 0.0;
    r.slots_simulated = cfg.horizon;
    r.deliveries = std::move(deliveries);
    return r;
}

SimResult replicate(const SimConfig& cfg_in, unsigned threads) {
    cfg_in.validate();
    SimConfig cfg = cfg_in;
    prepare_policy(cfg);

    const std::uint32_t reps = cfg.replications;
    std::vector<SimResult> runs(reps);
    std::atomic<std::uint32_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::uint32_t k = next++; k < reps; k = next++) {
            try {
                runs[k] = run(cfg, k + 1);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const unsigned pool = std::max(1u, std::min<unsigned>(threads, reps));
    if (pool == 1) {
        worker();
    } else {
        std::vector<std::jthread> workers;
        for (unsigned i = 0; i < pool; ++i) workers.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    return aggregate(runs);
}

SimResult aggregate(std::span<const SimResult> runs) {
    if (runs.empty()) fail(ErrorCode::invalid_argument, "nothing to aggregate");
    if (runs.size() == 1) return runs.front();
    const std::size_t n = runs.front().per_client_avg_aoi.size();
    const double reps = static_cast<double>(runs.size());
    SimResult agg;
    agg.per_client_avg_aoi.assign(n, 0.0);
    agg.deliveries.assign(n, 0);
    double sum = 0.0;
    for (const auto& r : runs) {
        sum += r.network_avg_aoi;
        for (std::size_t i = 0; i < n; ++i) {
            agg.per_client_avg_aoi[i] += r.per_client_avg_aoi[i] / reps;
            agg.deliveries[i] += r.deliveries[i];
        }
        agg.slots_simulated += r.slots_simulated;
    }
    const double mean = sum / reps;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.network_avg_aoi - mean) * (r.network_avg_aoi - mean);
    agg.replication_mean = mean;
    agg.replication_stderr = std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps);
    double total = 0.0;
    for (double v : agg.per_client_avg_aoi) total += v;
    agg.network_avg_aoi = total / static_cast<double>(n);
    return agg;
}

unsigned default_threads() {
    if (const char* env = std::getenv("AOI_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace aoi
