#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "error.hpp"
#include "index.hpp"

namespace aoi {

namespace {

constexpr double kInteriorDecay = 1e-12;

std::int64_t ceil_int(double v) {
    return static_cast<std::int64_t>(std::ceil(v - 1e-9));
}

struct Kernel {
    double lambda;
    double p;
    double subsidy;
    std::int64_t a_max;
    std::int64_t d_max;
};

// mu0 (passive) and mu1 (active) at (a, d), costs as seen after the action.
inline std::pair<double, double> branches(const Kernel& k, const double* h, std::int64_t width, std::int64_t a,
                                          std::int64_t d) noexcept {
    const std::int64_t next_a = std::min(a + 1, k.a_max);
    const std::int64_t jump_d = std::min(a + d, k.d_max);
    const std::int64_t fresh_d = std::min(a, k.d_max);
    const double* row_one = h;
    const double* row_next = h + (next_a - 1) * width;

    const double keep = k.lambda * row_one[jump_d] + (1.0 - k.lambda) * row_next[d];
    const double refresh = k.lambda * row_one[fresh_d] + (1.0 - k.lambda) * row_next[0];
    const double ad = static_cast<double>(a);
    const double dd = static_cast<double>(d);
    const double mu0 = keep + ad + dd - k.subsidy;
    const double mu1 = (1.0 - k.p) * keep + k.p * refresh + ad + (1.0 - k.p) * dd;
    return {mu0, mu1};
}

Kernel kernel_of(const DecoupledProblem& prob) {
    return {prob.params().lambda(), prob.params().p(), prob.subsidy(), prob.a_max(), prob.d_max()};
}

MdpSolution solve_impl(const DecoupledProblem& prob, const SolveOptions& opts, const GridTable<double>* warm) {
    if (!(opts.tol > 0.0)) fail(ErrorCode::invalid_argument, "solver tolerance must be positive");
    if (opts.max_iter < 1) fail(ErrorCode::invalid_argument, "max_iter must be positive");
    if (!(opts.damping > 0.0 && opts.damping <= 1.0)) fail(ErrorCode::invalid_argument, "damping must lie in (0,1]");

    const Kernel k = kernel_of(prob);
    const std::int64_t width = k.d_max + 1;
    const double tau = opts.damping;

    GridTable<double> h(k.a_max, k.d_max, 0.0);
    if (warm && warm->a_max() == k.a_max && warm->d_max() == k.d_max) h = *warm;
    GridTable<double> next(k.a_max, k.d_max, 0.0);

    MdpSolution sol;
    bool converged = false;
    double span = std::numeric_limits<double>::infinity();
    std::int64_t iter = 0;
    while (iter < opts.max_iter) {
        ++iter;
        const double* hv = h.raw().data();
        double* nv = next.raw().data();
        const auto [r0, r1] = branches(k, hv, width, 1, 0);
        const double ref = std::min(r0, r1);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::int64_t a = 1; a <= k.a_max; ++a) {
            const std::int64_t base = (a - 1) * width;
            for (std::int64_t d = 0; d <= k.d_max; ++d) {
                const auto [m0, m1] = branches(k, hv, width, a, d);
                const double old = hv[base + d];
                const double v = (1.0 - tau) * old + tau * (std::min(m0, m1) - ref);
                nv[base + d] = v;
                const double diff = v - old;
                lo = std::min(lo, diff);
                hi = std::max(hi, diff);
            }
        }
        std::swap(h, next);
        span = hi - lo;
        if (span < opts.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        fail(ErrorCode::no_convergence, "relative value iteration did not converge in " +
                                            std::to_string(opts.max_iter) + " iterations (final span " +
                                            std::to_string(span) + ")");

    const double* hv = h.raw().data();
    const auto [r0, r1] = branches(k, hv, width, 1, 0);
    sol.average_cost = std::min(r0, r1) - hv[0];
    sol.iterations = iter;
    sol.final_span = span;
    sol.action = GridTable<Action>(k.a_max, k.d_max, Action::passive);
    sol.thresholds.assign(static_cast<std::size_t>(k.a_max), k.d_max + 1);
    for (std::int64_t a = 1; a <= k.a_max; ++a) {
        for (std::int64_t d = 0; d <= k.d_max; ++d) {
            const auto [m0, m1] = branches(k, hv, width, a, d);
            if (m1 <= m0 + opts.tie_tolerance) {
                sol.action(a, d) = Action::active;
                auto& t = sol.thresholds[static_cast<std::size_t>(a - 1)];
                t = std::min(t, d);
            }
        }
        if (sol.threshold(a) >= k.d_max) sol.saturated = true;
    }
    sol.bias = std::move(h);
    return sol;
}

}  // namespace

std::int64_t boundary_margin(double q, double decay) {
    if (q >= 1.0) return 1;
    return static_cast<std::int64_t>(std::ceil(std::log(decay) / std::log1p(-q))) + 1;
}

std::int64_t DecoupledProblem::min_a_max(double subsidy, const ClientParams& params) {
    return 2 * ceil_int(dstar(subsidy, params)) + 4;
}

std::int64_t DecoupledProblem::min_d_max(double subsidy, const ClientParams& params) {
    return 2 * ceil_int(d1_upper(subsidy, params)) + ceil_int(dstar(subsidy, params)) + 4;
}

DecoupledProblem::DecoupledProblem(ClientParams params, double subsidy, std::int64_t a_max, std::int64_t d_max,
                                   bool enforce_truncation)
    : params_(params), subsidy_(subsidy), a_max_(a_max), d_max_(d_max) {
    if (!(subsidy >= 0.0) || !std::isfinite(subsidy))
        fail(ErrorCode::invalid_argument, "subsidy must be a finite nonnegative number");
    if (a_max < 1 || d_max < 1) fail(ErrorCode::invalid_argument, "truncation bounds must be positive");
    if (enforce_truncation) {
        const auto need_a = min_a_max(subsidy, params);
        const auto need_d = min_d_max(subsidy, params);
        if (a_max < need_a || d_max < need_d)
            fail(ErrorCode::truncation, "truncation too small for W=" + std::to_string(subsidy) + ": need a_max >= " +
                                            std::to_string(need_a) + " and d_max >= " + std::to_string(need_d));
    }
    const auto margin_a = boundary_margin(params.lambda(), kInteriorDecay);
    const auto margin_k = std::max(margin_a, boundary_margin(params.p(), kInteriorDecay));
    interior_a_ = std::max<std::int64_t>(1, a_max - margin_a);
    interior_k_ = std::max<std::int64_t>(1, d_max - margin_k);
}

DecoupledProblem DecoupledProblem::sized_for(ClientParams params, double subsidy, double decay) {
    const auto core_a = min_a_max(subsidy, params);
    const auto core_d = min_d_max(subsidy, params);
    const auto margin_a = boundary_margin(params.lambda(), decay);
    const auto margin_k = std::max(margin_a, boundary_margin(params.p(), decay));
    return DecoupledProblem(params, subsidy, core_a + margin_a, core_a + core_d + margin_k);
}

MdpSolution solve_decoupled(const DecoupledProblem& prob, const SolveOptions& opts) {
    return solve_impl(prob, opts, nullptr);
}

std::pair<double, double> bellman_branches(const DecoupledProblem& prob, const GridTable<double>& h, std::int64_t a,
                                           std::int64_t d) {
    return branches(kernel_of(prob), h.raw().data(), prob.d_max() + 1, a, d);
}

double bellman_residual(const DecoupledProblem& prob, const MdpSolution& sol) {
    double worst = 0.0;
    for (std::int64_t a = 1; a <= prob.interior_a(); ++a) {
        for (std::int64_t d = 0; a + d <= prob.interior_k() && d <= prob.d_max(); ++d) {
            const auto [m0, m1] = bellman_branches(prob, sol.bias, a, d);
            worst = std::max(worst, std::abs(sol.bias(a, d) + sol.average_cost - std::min(m0, m1)));
        }
    }
    return worst;
}

ActivePassive extract_active_passive(const MdpSolution& sol) {
    ActivePassive out;
    for (std::int64_t a = 1; a <= sol.action.a_max(); ++a)
        for (std::int64_t d = 0; d <= sol.action.d_max(); ++d)
            (sol.action(a, d) == Action::active ? out.active : out.passive).emplace_back(a, d);
    return out;
}

double numeric_whittle(std::int64_t a, std::int64_t d, const ClientParams& params, double w_hi, double tol_w,
                       const SolveOptions& opts) {
    if (a < 1 || d < 0) fail(ErrorCode::invalid_argument, "numeric_whittle needs a >= 1 and d >= 0");
    if (!(w_hi > 0.0) || !std::isfinite(w_hi)) fail(ErrorCode::invalid_argument, "w_hi must be positive");
    if (!(tol_w > 0.0)) fail(ErrorCode::invalid_argument, "tol_w must be positive");

    const double decay = 1e-10;
    const auto base = DecoupledProblem::sized_for(params, w_hi, decay);
    const auto margin_a = boundary_margin(params.lambda(), decay);
    const auto margin_k = std::max(margin_a, boundary_margin(params.p(), decay));
    const auto a_max = std::max(base.a_max(), a + margin_a);
    const auto d_max = std::max(base.d_max(), a_max + d + margin_k);

    GridTable<double> warm;
    auto passive_at = [&](double w) {
        const DecoupledProblem prob(params, w, a_max, d_max, false);
        auto sol = solve_impl(prob, opts, warm.raw().empty() ? nullptr : &warm);
        warm = std::move(sol.bias);
        return sol.action(a, d) == Action::passive;
    };

    constexpr int kScan = 8;
    int first_passive = -1;
    for (int i = 0; i <= kScan; ++i) {
        const double w = w_hi * i / kScan;
        const bool passive = passive_at(w);
        if (passive && first_passive < 0) first_passive = i;
        if (!passive && first_passive >= 0)
            fail(ErrorCode::non_monotone, "state (" + std::to_string(a) + "," + std::to_string(d) +
                                              ") is passive at W=" + std::to_string(w_hi * first_passive / kScan) +
                                              " but active at W=" + std::to_string(w));
    }
    if (first_passive < 0)
        fail(ErrorCode::bracket, "state (" + std::to_string(a) + "," + std::to_string(d) +
                                     ") is still active at w_hi=" + std::to_string(w_hi));
    if (first_passive == 0) return 0.0;

    double lo = w_hi * (first_passive - 1) / kScan;
    double hi = w_hi * first_passive / kScan;
    while (hi - lo > tol_w) {
        const double mid = 0.5 * (lo + hi);
        (passive_at(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

bool StructureReport::all_passed() const noexcept {
    return truncation_ok && diagonal_bias.passed && threshold_gap.passed && tail_slope_d.passed &&
           tail_slope_a.passed && threshold_limit.passed && monotone_h.passed && monotone_d.passed &&
           threshold_type.passed && threshold_bounds.passed && closed_form_h.passed;
}

StructureReport verify_structure(const MdpSolution& sol, const DecoupledProblem& prob, double tol) {
    StructureReport rep;
    rep.truncation_ok = !sol.saturated;

    const auto& h = sol.bias;
    const double p = prob.params().p();
    const double w = prob.subsidy();
    const double dl = delta(prob.params());
    const double limit = dstar(w, prob.params());
    const std::int64_t limit_int = ceil_int(limit);
    const std::int64_t top_a = prob.interior_a();
    const std::int64_t top_k = std::min(prob.interior_k(), prob.d_max());
    // Bias comparisons that should be exact tolerate solver noise only.
    const double noise = std::max(1e-9, 100.0 * sol.final_span);

    auto note = [](CheckResult& c, double residual, bool ok) {
        c.evaluated = true;
        ++c.samples;
        c.residual = std::max(c.residual, residual);
        c.passed = c.passed && ok;
    };

    // threshold type and monotone h
    rep.threshold_type.tolerance = 0.0;
    rep.monotone_h.tolerance = noise;
    for (std::int64_t a = 1; a <= top_a; ++a) {
        bool seen_active = false;
        for (std::int64_t d = 0; a + d <= top_k; ++d) {
            const bool active = sol.action(a, d) == Action::active;
            if (seen_active && !active)
                note(rep.threshold_type, 1.0, false);
            else
                note(rep.threshold_type, 0.0, true);
            seen_active = seen_active || active;
            if (a + d + 1 <= top_k) {
                const double drop = h(a, d) - h(a, d + 1);
                note(rep.monotone_h, std::max(0.0, drop), drop <= noise);
            }
        }
    }

    rep.monotone_d.tolerance = 0.0;
    for (std::int64_t a = 1; a < top_a; ++a) {
        const auto gap = sol.threshold(a) - sol.threshold(a + 1);
        note(rep.monotone_d, static_cast<double>(std::max<std::int64_t>(0, gap)), gap <= 0);
    }

    // bias depends only on K = a + d across passive states
    rep.diagonal_bias.tolerance = tol;
    std::map<std::int64_t, std::pair<double, double>> by_k;
    for (std::int64_t a = 1; a <= top_a; ++a) {
        for (std::int64_t d = 0; a + d <= top_k; ++d) {
            if (sol.action(a, d) != Action::passive) continue;
            auto [it, fresh] = by_k.try_emplace(a + d, h(a, d), h(a, d));
            if (!fresh) {
                it->second.first = std::min(it->second.first, h(a, d));
                it->second.second = std::max(it->second.second, h(a, d));
            }
        }
    }
    for (const auto& [key, range] : by_k) {
        const double r = range.second - range.first;
        note(rep.diagonal_bias, r, r < tol);
    }

    // at integer thresholds: 0 <= h(a,D_a) - h(a,0) - W/p <= h(a,D_a) - h(a,D_a - 1)
    for (std::int64_t a = 1; a <= top_a; ++a) {
        const auto t = sol.threshold(a);
        if (t < 1 || a + t > top_k) continue;
        const double r = h(a, t) - h(a, 0) - w / p;
        const double slack = h(a, t) - h(a, t - 1);
        rep.threshold_gap.tolerance = std::max(rep.threshold_gap.tolerance, slack);
        note(rep.threshold_gap, std::abs(r), r >= -tol && r <= slack + tol);
    }

    // G(a,d) = (1-p)/p beyond the limiting threshold
    rep.tail_slope_d.tolerance = tol;
    const double g_expected = (1.0 - p) / p;
    for (std::int64_t a = 1; a <= top_a; ++a) {
        for (std::int64_t d = limit_int; a + d + 1 <= top_k; ++d) {
            const double r = std::abs(h(a, d + 1) - h(a, d) - g_expected);
            note(rep.tail_slope_d, r, r < tol);
        }
    }

    // h(a+1,0) - h(a,0) = Delta for a >= D*
    rep.tail_slope_a.tolerance = tol;
    for (std::int64_t a = std::max<std::int64_t>(1, limit_int); a + 1 <= top_a; ++a) {
        const double r = std::abs(h(a + 1, 0) - h(a, 0) - dl);
        note(rep.tail_slope_a, r, r < tol);
    }

    // thresholds settle at D* once a >= D*
    rep.threshold_limit.tolerance = 1.0;
    for (std::int64_t a = std::max<std::int64_t>(1, limit_int); a <= top_a; ++a) {
        const double r = std::abs(static_cast<double>(sol.threshold(a)) - limit);
        note(rep.threshold_limit, r, r <= 1.0 + 1e-9);
    }

    rep.threshold_bounds.tolerance = 1.0;
    const auto bounds = ThresholdBounds::make(w, prob.params());
    for (std::int64_t a = 1; a <= top_a; ++a) {
        const double excess = static_cast<double>(sol.threshold(a)) - bounds.per_a_upper(a) - 1.0;
        note(rep.threshold_bounds, std::max(0.0, excess), excess <= 1e-9);
    }

    // h(a,0) = (a-1)J' - a(a-1)/2 while (1, a-1) is still passive, where
    // J' = J + W is the average cost when activity is charged W instead of
    // passivity being paid W.
    rep.closed_form_h.tolerance = tol;
    const double j = sol.average_cost + w;
    for (std::int64_t a = 1; a <= std::min(sol.threshold(1), top_a); ++a) {
        const double ad = static_cast<double>(a);
        const double r = std::abs(h(a, 0) - ((ad - 1.0) * j - ad * (ad - 1.0) / 2.0));
        note(rep.closed_form_h, r, r < tol);
    }

    return rep;
}

}  // namespace aoi
