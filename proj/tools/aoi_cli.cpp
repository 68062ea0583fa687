// Command-line front end; talks to the library only through the C API.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aoi/aoi.h"

namespace {

enum Exit : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kNoConvergence = 3,
    kCheckFailed = 4,
    kTruncation = 5,
};

int exit_for(aoi_status s) {
    switch (s) {
        case AOI_OK:
            return kOk;
        case AOI_ERR_INVALID_ARGUMENT:
        case AOI_ERR_PARSE:
        case AOI_ERR_IO:
        case AOI_ERR_BRACKET:
            return kUsage;
        case AOI_ERR_NO_CONVERGENCE:
            return kNoConvergence;
        case AOI_ERR_NON_MONOTONE:
            return kCheckFailed;
        case AOI_ERR_TRUNCATION:
            return kTruncation;
        case AOI_ERR_INTERNAL:
            return kInternal;
    }
    return kInternal;
}

int report(aoi_status s) {
    std::cerr << "error (" << aoi_status_name(s) << "): " << aoi_last_error() << "\n";
    return exit_for(s);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void print_owned(char* s) {
    std::fputs(s, stdout);
    aoi_string_free(s);
}

struct SolveArgs {
    double lambda = 0.0;
    double p = 0.0;
    double subsidy = 0.0;
    int64_t a_max = 0;
    int64_t d_max = 0;
    double tol = 1e-9;
    int64_t max_iter = 1'000'000;
};

aoi_solve_options solve_opts(const SolveArgs& a) {
    auto o = aoi_solve_options_default();
    o.tol = a.tol;
    o.max_iter = a.max_iter;
    return o;
}

int cmd_index(int64_t a, int64_t d, double lambda, double p) {
    aoi_index_info info{};
    if (auto s = aoi_approx_index(a, d, lambda, p, &info); s != AOI_OK) return report(s);
    double dl = 0.0;
    aoi_delta(lambda, p, &dl);
    std::cout << "a=" << a << " d=" << d << " lambda=" << num(lambda) << " p=" << num(p) << " delta=" << num(dl) << "\n"
              << "condition: d*delta/a = " << num(info.condition_lhs) << (info.quadratic ? " >= " : " < ")
              << "(a-1)/2 + delta = " << num(info.condition_rhs) << "\n"
              << "x=" << num(info.x) << "\n"
              << "quadratic_branch=" << num(info.quadratic_branch) << "\n"
              << "linear_branch=" << num(info.linear_branch) << "\n"
              << "index=" << num(info.value) << " branch=" << (info.quadratic ? "quadratic" : "linear") << "\n";
    return kOk;
}

int cmd_solve(const SolveArgs& args, const std::vector<int64_t>& slices) {
    const auto opts = solve_opts(args);
    aoi_solution* sol = nullptr;
    if (auto s = aoi_decoupled_solve(args.lambda, args.p, args.subsidy, args.a_max, args.d_max, &opts, &sol);
        s != AOI_OK)
        return report(s);
    std::cout << "lambda,p,W,a_max,d_max,J,iterations,span,saturated\n"
              << num(args.lambda) << ',' << num(args.p) << ',' << num(args.subsidy) << ',' << aoi_solution_a_max(sol)
              << ',' << aoi_solution_d_max(sol) << ',' << num(aoi_solution_average_cost(sol)) << ','
              << aoi_solution_iterations(sol) << ',' << num(aoi_solution_span(sol)) << ','
              << aoi_solution_saturated(sol) << "\n\n";
    std::cout << "a,threshold\n";
    const int64_t top = aoi_solution_interior_a(sol);
    for (int64_t a = 1; a <= top; ++a) std::cout << a << ',' << aoi_solution_threshold(sol, a) << "\n";
    if (!slices.empty()) {
        std::cout << "\na,d,h,action\n";
        for (int64_t a : slices) {
            for (int64_t d = 0; d <= aoi_solution_d_max(sol); ++d) {
                const double h = aoi_solution_bias(sol, a, d);
                if (std::isnan(h)) break;
                std::cout << a << ',' << d << ',' << num(h) << ','
                          << (aoi_solution_action(sol, a, d) == 1 ? "active" : "passive") << "\n";
            }
        }
    }
    const bool saturated = aoi_solution_saturated(sol) != 0;
    aoi_solution_free(sol);
    if (saturated) {
        std::cerr << "error: a threshold reached d_max; enlarge the truncation\n";
        return kTruncation;
    }
    return kOk;
}

void print_check(std::ostream& os, const aoi_check& c) {
    os << ',' << (c.evaluated ? (c.passed ? "pass" : "FAIL") : "n/a") << ',' << num(c.residual);
}

int cmd_verify(const std::vector<double>& lambdas, const std::vector<double>& ps, const std::vector<double>& ws,
               const SolveArgs& base, double check_tol) {
    std::cout << "lambda,p,W,a_max,d_max,J,iterations,truncation";
    for (const char* name : {"threshold_type", "monotone_h", "monotone_d", "diagonal_bias", "threshold_gap",
                             "tail_slope_d", "tail_slope_a", "threshold_limit", "threshold_bounds", "closed_form_h"})
        std::cout << ',' << name << ',' << name << "_residual";
    std::cout << '\n';

    int worst = kOk;
    for (double l : lambdas) {
        for (double p : ps) {
            for (double w : ws) {
                SolveArgs a = base;
                a.lambda = l;
                a.p = p;
                a.subsidy = w;
                const auto opts = solve_opts(a);
                aoi_solution* sol = nullptr;
                if (auto s = aoi_decoupled_solve(l, p, w, a.a_max, a.d_max, &opts, &sol); s != AOI_OK) {
                    const int code = report(s);
                    if (code == kUsage) return code;
                    worst = std::max(worst, code);
                    continue;
                }
                aoi_structure_report r{};
                if (auto s = aoi_verify(sol, check_tol, &r); s != AOI_OK) {
                    aoi_solution_free(sol);
                    return report(s);
                }
                std::cout << num(l) << ',' << num(p) << ',' << num(w) << ',' << aoi_solution_a_max(sol) << ','
                          << aoi_solution_d_max(sol) << ',' << num(aoi_solution_average_cost(sol)) << ','
                          << aoi_solution_iterations(sol) << ',' << (r.truncation_ok ? "ok" : "SATURATED");
                for (const auto* c :
                     {&r.threshold_type, &r.monotone_h, &r.monotone_d, &r.diagonal_bias, &r.threshold_gap,
                      &r.tail_slope_d, &r.tail_slope_a, &r.threshold_limit, &r.threshold_bounds, &r.closed_form_h})
                    print_check(std::cout, *c);
                std::cout << '\n';
                if (!r.truncation_ok) {
                    std::cerr << "error: truncation saturated at lambda=" << num(l) << " p=" << num(p)
                              << " W=" << num(w) << "\n";
                    worst = std::max(worst, static_cast<int>(kTruncation));
                } else if (!r.all_passed) {
                    worst = std::max(worst, static_cast<int>(kCheckFailed));
                }
                aoi_solution_free(sol);
            }
        }
    }
    return worst;
}

int cmd_whittle(int64_t a, int64_t d, double lambda, double p, double w_hi, double tol_w, const SolveArgs& base) {
    if (w_hi <= 0.0) {
        aoi_index_info info{};
        if (auto s = aoi_approx_index(a, d, lambda, p, &info); s != AOI_OK) return report(s);
        w_hi = 2.0 * info.value + 10.0;
    }
    const auto opts = solve_opts(base);
    double w = 0.0;
    if (auto s = aoi_numeric_whittle(a, d, lambda, p, w_hi, tol_w, &opts, &w); s != AOI_OK) return report(s);
    aoi_index_info info{};
    aoi_approx_index(a, d, lambda, p, &info);
    std::cout << "a,d,lambda,p,numeric_index,approx_index,w_hi,tol_w\n"
              << a << ',' << d << ',' << num(lambda) << ',' << num(p) << ',' << num(w) << ',' << num(info.value) << ','
              << num(w_hi) << ',' << num(tol_w) << "\n";
    return kOk;
}

int cmd_simulate(const std::string& path, unsigned threads, bool timing) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read config file '" << path << "'\n";
        return kUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    char* csv = nullptr;
    if (auto s = aoi_simulate_config(buf.str().c_str(), threads, timing ? 1 : 0, &csv); s != AOI_OK) return report(s);
    print_owned(csv);
    return kOk;
}

int cmd_bound(const std::vector<double>& ps) {
    double lb = 0.0;
    if (auto s = aoi_lower_bound(ps.data(), ps.size(), &lb); s != AOI_OK) return report(s);
    std::cout << num(lb) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Age-of-Information broadcast scheduling toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(aoi_version()));

    int64_t a = 1, d = 0;
    double lambda = 0.0, p = 0.0;
    SolveArgs solve;

    auto* index = app.add_subcommand("index", "Approximate Whittle index of one state");
    index->add_option("--a", a, "Queuing delay a (>= 1)")->required();
    index->add_option("--d", d, "AoI reduction d = A - a (>= 0)")->required();
    index->add_option("--lambda", lambda, "Arrival probability")->required();
    index->add_option("--p", p, "Channel success probability")->required();

    std::vector<int64_t> slices;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the single-client subsidy problem");
    solve_cmd->add_option("--lambda", solve.lambda, "Arrival probability")->required();
    solve_cmd->add_option("--p", solve.p, "Channel success probability")->required();
    solve_cmd->add_option("--W", solve.subsidy, "Subsidy for passivity")->required();
    solve_cmd->add_option("--a-max", solve.a_max, "Truncation in a (0 = automatic)");
    solve_cmd->add_option("--d-max", solve.d_max, "Truncation in d (0 = automatic)");
    solve_cmd->add_option("--tol", solve.tol, "Span stopping tolerance");
    solve_cmd->add_option("--max-iter", solve.max_iter, "Iteration cap");
    solve_cmd->add_option("--slices", slices, "Print h(a, .) and actions for these a")->delimiter(',');

    std::vector<double> v_lambdas{0.2, 0.5, 0.8, 1.0}, v_ps{0.3, 0.7, 1.0}, v_ws{5, 20, 50};
    SolveArgs verify_args;
    double check_tol = 1e-6;
    double one_lambda = 0.0, one_p = 0.0, one_w = -1.0;
    auto* verify = app.add_subcommand("verify", "Check threshold structure and bias properties on a grid");
    verify->add_option("--lambdas", v_lambdas, "Arrival probabilities of the grid")->delimiter(',');
    verify->add_option("--ps", v_ps, "Success probabilities of the grid")->delimiter(',');
    verify->add_option("--Ws", v_ws, "Subsidies of the grid")->delimiter(',');
    verify->add_option("--lambda", one_lambda, "Single instance: arrival probability");
    verify->add_option("--p", one_p, "Single instance: success probability");
    verify->add_option("--W", one_w, "Single instance: subsidy");
    verify->add_option("--a-max", verify_args.a_max, "Truncation in a (0 = automatic)");
    verify->add_option("--d-max", verify_args.d_max, "Truncation in d (0 = automatic)");
    verify->add_option("--tol", verify_args.tol, "Solver span tolerance");
    verify->add_option("--max-iter", verify_args.max_iter, "Iteration cap");
    verify->add_option("--check-tol", check_tol, "Residual tolerance for the structure checks");

    double w_hi = 0.0, tol_w = 1e-4;
    SolveArgs whittle_args;
    auto* whittle = app.add_subcommand("whittle", "Numeric Whittle index by bisection on the subsidy");
    whittle->add_option("--a", a, "Queuing delay a")->required();
    whittle->add_option("--d", d, "AoI reduction d")->required();
    whittle->add_option("--lambda", lambda, "Arrival probability")->required();
    whittle->add_option("--p", p, "Channel success probability")->required();
    whittle->add_option("--w-hi", w_hi, "Upper end of the subsidy bracket (default 2*approx + 10)");
    whittle->add_option("--tol-w", tol_w, "Bisection tolerance");
    whittle->add_option("--tol", whittle_args.tol, "Solver span tolerance");

    std::string config_path;
    unsigned threads = 0;
    bool timing = false;
    auto* simulate = app.add_subcommand("simulate", "Run the experiment described by a config file");
    simulate->add_option("config", config_path, "Config file")->required();
    simulate->add_option("--threads", threads, "Worker threads (0 = AOI_THREADS or hardware)");
    simulate->add_flag("--timing", timing, "Fill the wallclock_seconds column");

    std::string preset;
    auto eopts = aoi_experiment_options_default();
    std::vector<int64_t> n_values;
    std::vector<double> p_values;
    std::string policies;
    bool random_ties = false;
    auto* experiment = app.add_subcommand("experiment", "Run a preset sweep (fig2 or fig3)");
    experiment->add_option("preset", preset, "fig2 or fig3")->required()->check(CLI::IsMember({"fig2", "fig3"}));
    experiment->add_option("--scale", eopts.scale, "Horizon multiplier; < 1 also thins the fig2 sweep");
    experiment->add_option("--n", n_values, "fig2 client counts")->delimiter(',');
    experiment->add_option("--p", p_values, "fig3 success probabilities of the variable half")->delimiter(',');
    experiment->add_option("--policies", policies, "Comma separated policy names");
    experiment->add_option("--seed", eopts.seed, "Random seed");
    experiment->add_option("--replications", eopts.replications, "Replications per sweep point");
    experiment->add_option("--threads", eopts.threads, "Worker threads (0 = AOI_THREADS or hardware)");
    experiment->add_flag("--timing", timing, "Fill the wallclock_seconds column");
    experiment->add_flag("--random-ties", random_ties, "Break index ties uniformly at random");

    std::vector<double> bound_ps;
    auto* bound = app.add_subcommand("bound", "Lower bound on the average AoI");
    bound->add_option("ps", bound_ps, "Channel success probabilities, one per client")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*index) return cmd_index(a, d, lambda, p);
    if (*solve_cmd) return cmd_solve(solve, slices);
    if (*verify) {
        if (one_w >= 0.0 || one_lambda > 0.0 || one_p > 0.0) {
            if (!(one_w >= 0.0 && one_lambda > 0.0 && one_p > 0.0)) {
                std::cerr << "error: a single instance needs --lambda, --p and --W\n";
                return kUsage;
            }
            return cmd_verify({one_lambda}, {one_p}, {one_w}, verify_args, check_tol);
        }
        return cmd_verify(v_lambdas, v_ps, v_ws, verify_args, check_tol);
    }
    if (*whittle) return cmd_whittle(a, d, lambda, p, w_hi, tol_w, whittle_args);
    if (*simulate) return cmd_simulate(config_path, threads, timing);
    if (*experiment) {
        eopts.n_values = n_values.empty() ? nullptr : n_values.data();
        eopts.n_count = n_values.size();
        eopts.p_values = p_values.empty() ? nullptr : p_values.data();
        eopts.p_count = p_values.size();
        eopts.policies = policies.empty() ? nullptr : policies.c_str();
        eopts.random_ties = random_ties ? 1 : 0;
        eopts.timing = timing ? 1 : 0;
        char* csv = nullptr;
        if (auto s = aoi_run_experiment(preset.c_str(), &eopts, &csv); s != AOI_OK) return report(s);
        print_owned(csv);
        return kOk;
    }
    if (*bound) return cmd_bound(bound_ps);
    return kUsage;
}
