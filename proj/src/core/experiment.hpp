#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sim.hpp"

namespace aoi {

struct ExperimentOptions {
    /// Multiplies every preset horizon. Below 1 the fig2 sweep is thinned to
    /// N in {10, 20, 40, 80, 160}.
    double scale = 1.0;
    /// Explicit fig2 client counts (override the sweep).
    std::vector<std::int64_t> n_values;
    /// Explicit fig3 success probabilities for the variable half.
    std::vector<double> p_values;
    std::vector<PolicyKind> policies{PolicyKind::approx_index, PolicyKind::arrival_aware};
    TieRule tie = TieRule::lowest_index;
    std::uint64_t seed = 1;
    std::uint32_t replications = 4;
};

/// fig2: N clients, lambda = 10/(N+10), half p=0.9 and half p=0.1, horizon 6N x 10^4.
/// fig3: N=40, lambda=0.2, 20 clients at p=0.1 and 20 at the swept p, horizon 3 x 10^6.
/// Configs come out in sweep order, policies innermost.
std::vector<SimConfig> preset_configs(std::string_view name, const ExperimentOptions& opts);

struct CsvRow {
    SimConfig config;
    SimResult result;
    double lower_bound = 0.0;
    double wallclock_seconds = 0.0;
};

std::string csv_header();
std::string csv_line(const CsvRow& row);

/// Runs every config (replications fanned out over `threads`) and returns the
/// rows in input order. Without `timing` the wallclock column is 0 so that the
/// output is byte-identical across runs.
std::vector<CsvRow> run_rows(const std::vector<SimConfig>& configs, unsigned threads, bool timing);

std::string render_csv(const std::vector<CsvRow>& rows);

}  // namespace aoi
