#include "aoi/aoi.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "index.hpp"
#include "joint.hpp"
#include "oracle.hpp"
#include "policy.hpp"

struct aoi_solution {
    aoi::DecoupledProblem problem;
    aoi::MdpSolution solution;
};

struct aoi_joint {
    aoi::JointSolution solution;
};

namespace {

thread_local std::string g_last_error;

aoi_status to_status(aoi::ErrorCode code) {
    switch (code) {
        case aoi::ErrorCode::invalid_argument:
            return AOI_ERR_INVALID_ARGUMENT;
        case aoi::ErrorCode::no_convergence:
            return AOI_ERR_NO_CONVERGENCE;
        case aoi::ErrorCode::truncation:
            return AOI_ERR_TRUNCATION;
        case aoi::ErrorCode::non_monotone:
            return AOI_ERR_NON_MONOTONE;
        case aoi::ErrorCode::bracket:
            return AOI_ERR_BRACKET;
        case aoi::ErrorCode::parse:
            return AOI_ERR_PARSE;
        case aoi::ErrorCode::io:
            return AOI_ERR_IO;
        case aoi::ErrorCode::internal:
            return AOI_ERR_INTERNAL;
    }
    return AOI_ERR_INTERNAL;
}

template <class F>
aoi_status guarded(F&& body) {
    try {
        body();
        return AOI_OK;
    } catch (const aoi::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return AOI_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return AOI_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return AOI_ERR_INTERNAL;
    }
}

void require(const void* ptr, const char* what) {
    if (!ptr) aoi::fail(aoi::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

aoi::SolveOptions solve_options(const aoi_solve_options* opts) {
    aoi::SolveOptions o;
    if (opts) {
        o.tol = opts->tol;
        o.max_iter = opts->max_iter;
    }
    return o;
}

char* copy_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

aoi_check to_check(const aoi::CheckResult& c) {
    return {c.evaluated ? 1 : 0, c.passed ? 1 : 0, c.residual, c.tolerance, c.samples};
}

bool on_grid(const aoi_solution* sol, int64_t a, int64_t d) {
    return sol && a >= 1 && a <= sol->problem.a_max() && d >= 0 && d <= sol->problem.d_max();
}

}  // namespace

extern "C" {

const char* aoi_last_error(void) {
    return g_last_error.c_str();
}

const char* aoi_status_name(aoi_status status) {
    switch (status) {
        case AOI_OK:
            return "ok";
        case AOI_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case AOI_ERR_NO_CONVERGENCE:
            return "no convergence";
        case AOI_ERR_TRUNCATION:
            return "truncation too small";
        case AOI_ERR_NON_MONOTONE:
            return "non-monotone passive set";
        case AOI_ERR_BRACKET:
            return "bracket failure";
        case AOI_ERR_PARSE:
            return "parse error";
        case AOI_ERR_IO:
            return "i/o error";
        case AOI_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char* aoi_version(void) {
    return "1.0.0";
}

void aoi_string_free(char* s) {
    std::free(s);
}

aoi_status aoi_delta(double lambda, double p, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = aoi::delta(aoi::ClientParams(lambda, p));
    });
}

aoi_status aoi_approx_index(int64_t a, int64_t d, double lambda, double p, aoi_index_info* out) {
    return guarded([&] {
        require(out, "out");
        const auto v = aoi::approx_index(a, d, aoi::ClientParams(lambda, p));
        *out = {v.w, v.x, v.quadratic ? 1 : 0, v.condition_lhs, v.condition_rhs, v.quadratic_branch, v.linear_branch};
    });
}

aoi_status aoi_d1_upper(double subsidy, double lambda, double p, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = aoi::d1_upper(subsidy, aoi::ClientParams(lambda, p));
    });
}

aoi_status aoi_dstar(double subsidy, double lambda, double p, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = aoi::dstar(subsidy, aoi::ClientParams(lambda, p));
    });
}

aoi_status aoi_threshold_upper(int64_t a, double subsidy, double lambda, double p, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = aoi::threshold_upper(a, subsidy, aoi::ClientParams(lambda, p));
    });
}

aoi_status aoi_lower_bound(const double* ps, size_t n, double* out) {
    return guarded([&] {
        require(out, "out");
        require(ps, "ps");
        *out = aoi::lower_bound(std::span<const double>(ps, n));
    });
}

aoi_solve_options aoi_solve_options_default(void) {
    const aoi::SolveOptions o;
    return {o.tol, o.max_iter};
}

aoi_status aoi_decoupled_solve(double lambda, double p, double subsidy, int64_t a_max, int64_t d_max,
                               const aoi_solve_options* opts, aoi_solution** out) {
    return guarded([&] {
        require(out, "out");
        *out = nullptr;
        const aoi::ClientParams cp(lambda, p);
        auto prob = (a_max == 0 && d_max == 0) ? aoi::DecoupledProblem::sized_for(cp, subsidy)
                                               : aoi::DecoupledProblem(cp, subsidy, a_max, d_max);
        auto sol = aoi::solve_decoupled(prob, solve_options(opts));
        *out = new aoi_solution{std::move(prob), std::move(sol)};
    });
}

void aoi_solution_free(aoi_solution* sol) {
    delete sol;
}

double aoi_solution_average_cost(const aoi_solution* sol) {
    return sol ? sol->solution.average_cost : std::numeric_limits<double>::quiet_NaN();
}
int64_t aoi_solution_a_max(const aoi_solution* sol) {
    return sol ? sol->problem.a_max() : -1;
}
int64_t aoi_solution_d_max(const aoi_solution* sol) {
    return sol ? sol->problem.d_max() : -1;
}
int64_t aoi_solution_interior_a(const aoi_solution* sol) {
    return sol ? sol->problem.interior_a() : -1;
}
int64_t aoi_solution_interior_k(const aoi_solution* sol) {
    return sol ? sol->problem.interior_k() : -1;
}
int64_t aoi_solution_iterations(const aoi_solution* sol) {
    return sol ? sol->solution.iterations : -1;
}
double aoi_solution_span(const aoi_solution* sol) {
    return sol ? sol->solution.final_span : std::numeric_limits<double>::quiet_NaN();
}
int aoi_solution_saturated(const aoi_solution* sol) {
    return sol && sol->solution.saturated ? 1 : 0;
}

int64_t aoi_solution_threshold(const aoi_solution* sol, int64_t a) {
    if (!sol || a < 1 || a > sol->problem.a_max()) return -1;
    return sol->solution.threshold(a);
}

double aoi_solution_bias(const aoi_solution* sol, int64_t a, int64_t d) {
    if (!on_grid(sol, a, d)) return std::numeric_limits<double>::quiet_NaN();
    return sol->solution.bias(a, d);
}

int aoi_solution_action(const aoi_solution* sol, int64_t a, int64_t d) {
    if (!on_grid(sol, a, d)) return -1;
    return sol->solution.action(a, d) == aoi::Action::active ? 1 : 0;
}

size_t aoi_solution_active_count(const aoi_solution* sol) {
    if (!sol) return 0;
    return aoi::extract_active_passive(sol->solution).active.size();
}

aoi_status aoi_verify(const aoi_solution* sol, double tol, aoi_structure_report* out) {
    return guarded([&] {
        require(sol, "solution");
        require(out, "out");
        const auto r = aoi::verify_structure(sol->solution, sol->problem, tol);
        *out = {to_check(r.diagonal_bias), to_check(r.threshold_gap),   to_check(r.tail_slope_d),
                to_check(r.tail_slope_a),  to_check(r.threshold_limit), to_check(r.monotone_h),
                to_check(r.monotone_d),    to_check(r.threshold_type),  to_check(r.threshold_bounds),
                to_check(r.closed_form_h), r.truncation_ok ? 1 : 0,     r.all_passed() ? 1 : 0};
    });
}

aoi_status aoi_numeric_whittle(int64_t a, int64_t d, double lambda, double p, double w_hi, double tol_w,
                               const aoi_solve_options* opts, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = aoi::numeric_whittle(a, d, aoi::ClientParams(lambda, p), w_hi, tol_w, solve_options(opts));
    });
}

aoi_status aoi_joint_solve(const double* lambdas, const double* ps, size_t n, int64_t age_cap,
                           const aoi_solve_options* opts, aoi_joint** out) {
    return guarded([&] {
        require(out, "out");
        require(lambdas, "lambdas");
        require(ps, "ps");
        *out = nullptr;
        std::vector<aoi::ClientParams> clients;
        for (size_t i = 0; i < n; ++i) clients.emplace_back(lambdas[i], ps[i]);
        auto sol = aoi::solve_joint_optimal(aoi::JointProblem(std::move(clients), age_cap), solve_options(opts));
        *out = new aoi_joint{std::move(sol)};
    });
}

void aoi_joint_free(aoi_joint* joint) {
    delete joint;
}

double aoi_joint_average_aoi(const aoi_joint* joint) {
    return joint ? joint->solution.average_aoi : std::numeric_limits<double>::quiet_NaN();
}
int64_t aoi_joint_iterations(const aoi_joint* joint) {
    return joint ? joint->solution.iterations : -1;
}
int aoi_joint_saturated(const aoi_joint* joint) {
    return joint && joint->solution.saturated ? 1 : 0;
}

aoi_status aoi_joint_decide(const aoi_joint* joint, const int64_t* delays, const int64_t* ages, size_t n, int* client) {
    return guarded([&] {
        require(joint, "joint");
        require(delays, "delays");
        require(ages, "ages");
        require(client, "client");
        std::vector<aoi::ClientState> states;
        for (size_t i = 0; i < n; ++i) states.emplace_back(delays[i], ages[i]);
        const auto pick = joint->solution.policy.decide(states);
        *client = pick ? static_cast<int>(*pick) : -1;
    });
}

aoi_status aoi_simulate_config(const char* config_text, unsigned threads, int timing, char** csv_out) {
    return guarded([&] {
        require(config_text, "config_text");
        require(csv_out, "csv_out");
        *csv_out = nullptr;
        const auto configs = aoi::parse_config(config_text);
        const auto rows = aoi::run_rows(configs, threads ? threads : aoi::default_threads(), timing != 0);
        *csv_out = copy_string(aoi::render_csv(rows));
    });
}

aoi_experiment_options aoi_experiment_options_default(void) {
    aoi_experiment_options o{};
    o.scale = 1.0;
    o.seed = 1;
    o.replications = 4;
    return o;
}

aoi_status aoi_run_experiment(const char* name, const aoi_experiment_options* opts, char** csv_out) {
    return guarded([&] {
        require(name, "name");
        require(csv_out, "csv_out");
        *csv_out = nullptr;
        const aoi_experiment_options o = opts ? *opts : aoi_experiment_options_default();
        aoi::ExperimentOptions eo;
        eo.scale = o.scale;
        if (o.n_values) eo.n_values.assign(o.n_values, o.n_values + o.n_count);
        if (o.p_values) eo.p_values.assign(o.p_values, o.p_values + o.p_count);
        if (o.policies) {
            eo.policies.clear();
            std::string list = o.policies;
            std::size_t start = 0;
            while (start <= list.size()) {
                auto comma = list.find(',', start);
                if (comma == std::string::npos) comma = list.size();
                auto tok = list.substr(start, comma - start);
                if (!tok.empty()) eo.policies.push_back(aoi::parse_policy_kind(tok));
                start = comma + 1;
            }
        }
        eo.tie = o.random_ties ? aoi::TieRule::uniform_random : aoi::TieRule::lowest_index;
        eo.seed = o.seed;
        eo.replications = o.replications;
        const auto configs = aoi::preset_configs(name, eo);
        const auto rows = aoi::run_rows(configs, o.threads ? o.threads : aoi::default_threads(), o.timing != 0);
        *csv_out = copy_string(aoi::render_csv(rows));
    });
}

}  // extern "C"
