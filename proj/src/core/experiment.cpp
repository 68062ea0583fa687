#include "experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "config.hpp"
#include "error.hpp"
#include "index.hpp"

namespace aoi {

namespace {

std::uint64_t scaled(double slots, double scale) {
    const double v = std::llround(slots * scale);
    if (v < 10.0) fail(ErrorCode::invalid_argument, "scale leaves fewer than 10 slots");
    return static_cast<std::uint64_t>(v);
}

SimConfig preset_base(const char* name, std::uint64_t horizon, const ExperimentOptions& opts) {
    SimConfig c;
    c.experiment = name;
    c.horizon = horizon;
    c.warmup = default_warmup(horizon);
    c.seed = opts.seed;
    c.replications = opts.replications;
    c.policy.tie = opts.tie;
    return c;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

std::vector<SimConfig> preset_configs(std::string_view name, const ExperimentOptions& opts) {
    if (!(opts.scale > 0.0)) fail(ErrorCode::invalid_argument, "scale must be positive");
    if (opts.policies.empty()) fail(ErrorCode::invalid_argument, "no policies selected");
    std::vector<SimConfig> out;
    auto emit = [&](const SimConfig& base) {
        for (auto k : opts.policies) {
            SimConfig c = base;
            c.policy.kind = k;
            c.validate();
            out.push_back(std::move(c));
        }
    };

    if (name == "fig2") {
        std::vector<std::int64_t> ns = opts.n_values;
        if (ns.empty()) {
            if (opts.scale < 1.0)
                ns = {10, 20, 40, 80, 160};
            else
                for (std::int64_t n = 10; n <= 200; n += 10) ns.push_back(n);
        }
        for (auto n : ns) {
            if (n < 2 || n % 2 != 0) fail(ErrorCode::invalid_argument, "fig2 needs an even client count >= 2");
            const double lambda = 10.0 / static_cast<double>(n + 10);
            auto base = preset_base("fig2", scaled(6.0 * static_cast<double>(n) * 1e4, opts.scale), opts);
            base.clients.assign(static_cast<std::size_t>(n / 2), ClientParams(lambda, 0.9));
            base.clients.insert(base.clients.end(), static_cast<std::size_t>(n / 2), ClientParams(lambda, 0.1));
            emit(base);
        }
    } else if (name == "fig3") {
        std::vector<double> ps = opts.p_values;
        if (ps.empty())
            for (int k = 1; k <= 10; ++k) ps.push_back(k / 10.0);
        for (double p : ps) {
            auto base = preset_base("fig3", scaled(3e6, opts.scale), opts);
            base.clients.assign(20, ClientParams(0.2, 0.1));
            base.clients.insert(base.clients.end(), 20, ClientParams(0.2, p));
            emit(base);
        }
    } else {
        fail(ErrorCode::invalid_argument, "unknown experiment '" + std::string(name) + "' (expected fig2 or fig3)");
    }
    return out;
}

std::string csv_header() {
    return "experiment,policy,N,horizon,warmup,seed,replications,mean_aoi,stderr,lower_bound,wallclock_seconds,"
           "clients\n";
}

std::string csv_line(const CsvRow& row) {
    const auto& c = row.config;
    std::string s;
    s += c.experiment + ',' + c.policy.label() + ',' + std::to_string(c.clients.size()) + ',' +
         std::to_string(c.horizon) + ',' + std::to_string(c.warmup) + ',' + std::to_string(c.seed) + ',' +
         std::to_string(c.replications) + ',';
    s += fmt(row.result.replication_mean) + ',' + fmt(row.result.replication_stderr) + ',' + fmt(row.lower_bound) +
         ',' + fmt(row.wallclock_seconds) + ',' + client_profile(c.clients) + '\n';
    return s;
}

std::vector<CsvRow> run_rows(const std::vector<SimConfig>& configs_in, unsigned threads, bool timing) {
    std::vector<SimConfig> configs = configs_in;
    for (auto& c : configs) {
        c.validate();
        prepare_policy(c);
    }

    struct Job {
        std::size_t config;
        std::uint32_t replication;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < configs.size(); ++i)
        for (std::uint32_t r = 1; r <= configs[i].replications; ++r) jobs.push_back({i, r});

    std::vector<SimResult> results(jobs.size());
    std::vector<double> seconds(jobs.size(), 0.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                const auto t0 = std::chrono::steady_clock::now();
                results[k] = run(configs[jobs[k].config], jobs[k].replication);
                seconds[k] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    const auto pool = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, jobs.size())));
    if (pool == 1) {
        worker();
    } else {
        std::vector<std::jthread> workers;
        for (unsigned i = 0; i < pool; ++i) workers.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    std::vector<CsvRow> rows;
    std::size_t k = 0;
    for (const auto& c : configs) {
        const std::span<const SimResult> mine(results.data() + k, c.replications);
        double wall = 0.0;
        for (std::uint32_t r = 0; r < c.replications; ++r) wall += seconds[k + r];
        k += c.replications;
        const auto ps = c.success_probs();
        rows.push_back({c, aggregate(mine), lower_bound(ps), timing ? wall : 0.0});
    }
    return rows;
}

std::string render_csv(const std::vector<CsvRow>& rows) {
    std::string out = csv_header();
    for (const auto& r : rows) out += csv_line(r);
    return out;
}

}  // namespace aoi
