#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "model.hpp"

namespace aoi {

struct SolveOptions {
    /// Stop when span(h_{k+1} - h_k) drops below this.
    double tol = 1e-9;
    std::int64_t max_iter = 1'000'000;
    /// mu1 <= mu0 + tie_tolerance counts as active.
    double tie_tolerance = 1e-7;
    /// Aperiodicity weight: h <- (1-tau) h + tau (T h - ref). Fixed points do not depend on it.
    double damping = 0.5;
};

enum class Action : std::uint8_t { passive = 0, active = 1 };

/// Slots needed for a boundary disturbance of size 1 to decay below `decay`
/// when it is discounted by (1 - q) per slot.
std::int64_t boundary_margin(double q, double decay);

/// Single-client subsidy-W problem on the truncated grid {1..a_max} x {0..d_max}.
/// Successor coordinates clamp at the grid edge.
class DecoupledProblem {
public:
    /// With `enforce_truncation` the grid must hold a_max >= 2 ceil(D*) + 4 and
    /// d_max >= 2 ceil(D1) + ceil(D*) + 4; otherwise Error(truncation).
    DecoupledProblem(ClientParams params, double subsidy, std::int64_t a_max, std::int64_t d_max,
                     bool enforce_truncation = true);

    /// Grid large enough that clamping perturbs the interior by less than `decay`
    /// (relative), with the interior covering the minimum truncation.
    static DecoupledProblem sized_for(ClientParams params, double subsidy, double decay = 1e-12);

    static std::int64_t min_a_max(double subsidy, const ClientParams& params);
    static std::int64_t min_d_max(double subsidy, const ClientParams& params);

    const ClientParams& params() const noexcept { return params_; }
    double subsidy() const noexcept { return subsidy_; }
    std::int64_t a_max() const noexcept { return a_max_; }
    std::int64_t d_max() const noexcept { return d_max_; }

    /// Interior states: a <= interior_a() and a + d <= interior_k(). Values there
    /// are insensitive to the clamping at the grid edge.
    std::int64_t interior_a() const noexcept { return interior_a_; }
    std::int64_t interior_k() const noexcept { return interior_k_; }
    bool interior(std::int64_t a, std::int64_t d) const noexcept {
        return a >= 1 && d >= 0 && a <= interior_a_ && a + d <= interior_k_;
    }

private:
    ClientParams params_;
    double subsidy_;
    std::int64_t a_max_;
    std::int64_t d_max_;
    std::int64_t interior_a_;
    std::int64_t interior_k_;
};

/// Row-major table over the (a, d) grid, a in 1..a_max, d in 0..d_max.
template <class T>
class GridTable {
public:
    GridTable() = default;
    GridTable(std::int64_t a_max, std::int64_t d_max, T fill = T{})
        : a_max_(a_max), width_(d_max + 1), data_(static_cast<std::size_t>(a_max * (d_max + 1)), fill) {}

    T& operator()(std::int64_t a, std::int64_t d) noexcept { return data_[index(a, d)]; }
    const T& operator()(std::int64_t a, std::int64_t d) const noexcept { return data_[index(a, d)]; }

    std::int64_t a_max() const noexcept { return a_max_; }
    std::int64_t d_max() const noexcept { return width_ - 1; }
    std::vector<T>& raw() noexcept { return data_; }
    const std::vector<T>& raw() const noexcept { return data_; }

private:
    std::size_t index(std::int64_t a, std::int64_t d) const noexcept {
        return static_cast<std::size_t>((a - 1) * width_ + d);
    }

    std::int64_t a_max_ = 0;
    std::int64_t width_ = 0;
    std::vector<T> data_;
};

struct MdpSolution {
    /// Optimal average cost.
    double average_cost = 0.0;
    /// Bias, normalized so h(1,0) = 0.
    GridTable<double> bias;
    GridTable<Action> action;
    /// thresholds[a-1] = min{d : active at (a,d)}, or d_max + 1 if none.
    std::vector<std::int64_t> thresholds;
    std::int64_t iterations = 0;
    double final_span = 0.0;
    /// Some threshold reached d_max: the grid is too small for this subsidy.
    bool saturated = false;

    std::int64_t threshold(std::int64_t a) const { return thresholds.at(static_cast<std::size_t>(a - 1)); }
};

/// Relative value iteration for the decoupled problem. Throws
/// Error(no_convergence) if max_iter is exhausted.
MdpSolution solve_decoupled(const DecoupledProblem& prob, const SolveOptions& opts = {});

/// Both Bellman branches at (a, d) for a given bias table.
std::pair<double, double> bellman_branches(const DecoupledProblem& prob, const GridTable<double>& h, std::int64_t a,
                                           std::int64_t d);

/// max over interior states of |h(a,d) + J - min(mu0, mu1)|.
double bellman_residual(const DecoupledProblem& prob, const MdpSolution& sol);

using GridState = std::pair<std::int64_t, std::int64_t>;

struct ActivePassive {
    std::vector<GridState> active;
    std::vector<GridState> passive;
};

ActivePassive extract_active_passive(const MdpSolution& sol);

/// Infimum subsidy in [0, w_hi] that makes (a, d) passive, located by a coarse
/// monotonicity scan followed by bisection down to tol_w. Throws
/// Error(bracket) if (a,d) is still active at w_hi and Error(non_monotone) if the
/// scan sees the passive set shrink as W grows.
double numeric_whittle(std::int64_t a, std::int64_t d, const ClientParams& params, double w_hi, double tol_w,
                       const SolveOptions& opts = {});

struct CheckResult {
    bool evaluated = false;
    bool passed = true;
    double residual = 0.0;
    double tolerance = 0.0;
    std::int64_t samples = 0;
};

struct StructureReport {
    CheckResult diagonal_bias;     // equal bias along a + d = K in the passive region
    CheckResult threshold_gap;     // h(a, D_a) - h(a, 0) = W/p up to one d-increment
    CheckResult tail_slope_d;      // h(a, d+1) - h(a, d) = (1-p)/p for d >= D*
    CheckResult tail_slope_a;      // h(a+1, 0) - h(a, 0) = Delta for a >= D*
    CheckResult threshold_limit;   // D_a within 1 of D* for a >= D*
    CheckResult monotone_h;        // h nondecreasing in d
    CheckResult monotone_d;        // D_a nondecreasing in a
    CheckResult threshold_type;    // active set upward closed in d
    CheckResult threshold_bounds;  // D_a <= upper bound + 1
    CheckResult closed_form_h;     // h(a, 0) = (a-1)(J + W) - a(a-1)/2 for a <= D_1
    bool truncation_ok = true;

    bool all_passed() const noexcept;
};

StructureReport verify_structure(const MdpSolution& sol, const DecoupledProblem& prob, double tol = 1e-6);

}  // namespace aoi
