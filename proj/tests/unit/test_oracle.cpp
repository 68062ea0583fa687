#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "index.hpp"
#include "oracle.hpp"

using namespace aoi;

namespace {

// lambda = p = 1 keeps a = 1 forever and a threshold D cycles d through 1..D. Per-cycle cost is
// sum_{d<D} (1 + d - W) for the passive slots plus 1 for the serving slot.
double cycle_cost(std::int64_t D, double w) {
    const double dd = static_cast<double>(D);
    return (dd + dd * (dd - 1) / 2 - (dd - 1) * w) / dd;
}

std::int64_t best_cycle(double w) {
    std::int64_t best = 1;
    for (std::int64_t D = 2; D < 200; ++D)
        if (cycle_cost(D, w) < cycle_cost(best, w)) best = D;
    return best;
}

}  // namespace

TEST_CASE("boundary margins") {
    CHECK(boundary_margin(1.0, 1e-12) == 1);
    // ln(1e-12)/ln(0.5) = 39.86
    CHECK(boundary_margin(0.5, 1e-12) == 41);
    CHECK(boundary_margin(0.9, 1e-12) == 13);
}

TEST_CASE("deterministic client: brute-force cycle oracle") {
    for (double w : {0.5, 2.0, 5.0, 12.0, 40.0}) {
        const auto prob = DecoupledProblem::sized_for(ClientParams(1.0, 1.0), w);
        const auto sol = solve_decoupled(prob);
        const auto D = best_cycle(w);
        CAPTURE(w);
        CHECK(sol.average_cost == doctest::Approx(cycle_cost(D, w)).epsilon(1e-7));
        CHECK(sol.threshold(1) == D);
        // Same threshold from the index: smallest d with d(d+1)/2 >= W
        std::int64_t by_index = 1;
        while (approx_index(1, by_index, ClientParams(1.0, 1.0)).w < w) ++by_index;
        CHECK(sol.threshold(1) == by_index);
    }
}

TEST_CASE("sized grids meet the minimum truncation") {
    for (double l : {0.2, 0.7, 1.0})
        for (double p : {0.3, 1.0})
            for (double w : {1.0, 25.0}) {
                const ClientParams c(l, p);
                const auto prob = DecoupledProblem::sized_for(c, w);
                CHECK(prob.a_max() >= DecoupledProblem::min_a_max(w, c));
                CHECK(prob.d_max() >= DecoupledProblem::min_d_max(w, c));
                CHECK(prob.a_max() >= 2 * static_cast<std::int64_t>(std::ceil(dstar(w, c))) + 4);
                CHECK(prob.interior(1, 0));
            }
}

TEST_CASE("too small a grid is refused unless explicitly allowed") {
    const ClientParams c(0.5, 0.5);
    try {
        DecoupledProblem(c, 20.0, 5, 5);
        FAIL("expected a truncation error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::truncation);
    }
    CHECK_NOTHROW(DecoupledProblem(c, 20.0, 5, 5, false));
    CHECK_THROWS_AS(DecoupledProblem(c, -1.0, 50, 50), Error);
}

TEST_CASE("saturation is flagged when the threshold hits the grid edge") {
    const DecoupledProblem prob(ClientParams(0.5, 0.5), 1e6, 8, 8, false);
    const auto sol = solve_decoupled(prob);
    CHECK(sol.saturated);
    CHECK_FALSE(verify_structure(sol, prob).truncation_ok);
}

TEST_CASE("solution satisfies the Bellman equation") {
    for (double l : {0.3, 1.0})
        for (double p : {0.4, 1.0})
            for (double w : {3.0, 30.0}) {
                const auto prob = DecoupledProblem::sized_for(ClientParams(l, p), w);
                const SolveOptions opts;
                const auto sol = solve_decoupled(prob, opts);
                CHECK(sol.final_span < opts.tol);
                CHECK(bellman_residual(prob, sol) < 10 * opts.tol);
                CHECK(sol.bias(1, 0) == doctest::Approx(0.0));
            }
}

TEST_CASE("non-convergence is reported") {
    SolveOptions opts;
    opts.max_iter = 3;
    const auto prob = DecoupledProblem::sized_for(ClientParams(0.4, 0.4), 10.0);
    try {
        solve_decoupled(prob, opts);
        FAIL("expected no_convergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_convergence);
    }
}

TEST_CASE("enlarging the truncation does not move the interior solution") {
    for (double l : {0.3, 0.8})
        for (double p : {0.3, 0.9}) {
            const ClientParams c(l, p);
            const double w = 15.0;
            const auto small = DecoupledProblem::sized_for(c, w);
            const DecoupledProblem big(c, w, small.a_max() * 3 / 2, small.d_max() * 3 / 2);
            const auto s1 = solve_decoupled(small);
            const auto s2 = solve_decoupled(big);
            CHECK(s1.average_cost == doctest::Approx(s2.average_cost).epsilon(1e-7));
            for (std::int64_t a = 1; a <= small.interior_a(); ++a) {
                CHECK(s1.threshold(a) == s2.threshold(a));
                for (std::int64_t d = 0; a + d <= small.interior_k(); d += 3)
                    CHECK(s1.bias(a, d) == doctest::Approx(s2.bias(a, d)).epsilon(1e-6));
            }
        }
}

TEST_CASE("perfect channel: bias is flat in d across the active region") {
    // With p = 1 the serve branch a + refresh does not depend on d.
    const auto prob = DecoupledProblem::sized_for(ClientParams(0.4, 1.0), 10.0);
    const auto sol = solve_decoupled(prob);
    for (std::int64_t a = 1; a <= prob.interior_a(); ++a) {
        const auto D = sol.threshold(a);
        for (std::int64_t d = D + 1; a + d <= prob.interior_k(); ++d)
            REQUIRE(sol.bias(a, d) == doctest::Approx(sol.bias(a, D)).epsilon(1e-9));
    }
}

TEST_CASE("zero subsidy makes every state with d > 0 active") {
    const auto prob = DecoupledProblem::sized_for(ClientParams(0.5, 0.5), 0.0);
    const auto sol = solve_decoupled(prob);
    for (std::int64_t a = 1; a <= prob.interior_a(); ++a) CHECK(sol.threshold(a) <= 1);
}

TEST_CASE("active/passive partition covers the grid") {
    const auto prob = DecoupledProblem::sized_for(ClientParams(0.5, 0.5), 6.0);
    const auto sol = solve_decoupled(prob);
    const auto parts = extract_active_passive(sol);
    CHECK(parts.active.size() + parts.passive.size() ==
          static_cast<std::size_t>(prob.a_max() * (prob.d_max() + 1)));
    for (auto [a, d] : parts.active) REQUIRE(d >= sol.threshold(a));
    for (auto [a, d] : parts.passive) REQUIRE(d < sol.threshold(a));
}

TEST_CASE("worked instance: lambda = p = 0.5, W = 6") {
    const auto prob = DecoupledProblem::sized_for(ClientParams(0.5, 0.5), 6.0);
    const auto sol = solve_decoupled(prob);
    // D1 <= d1_upper = 3, D* = 4
    CHECK(sol.threshold(1) <= 3);
    for (std::int64_t a = 4; a <= prob.interior_a(); ++a) CHECK(std::abs(sol.threshold(a) - 4) <= 1);
    const auto rep = verify_structure(sol, prob);
    CHECK(rep.all_passed());
}

TEST_CASE("structure report on a small grid of instances") {
    for (double l : {0.2, 0.5, 1.0})
        for (double p : {0.3, 1.0})
            for (double w : {5.0, 20.0}) {
                const auto prob = DecoupledProblem::sized_for(ClientParams(l, p), w);
                const auto sol = solve_decoupled(prob);
                const auto rep = verify_structure(sol, prob);
                CAPTURE(l);
                CAPTURE(p);
                CAPTURE(w);
                CHECK(rep.threshold_type.passed);
                CHECK(rep.monotone_h.passed);
                CHECK(rep.monotone_d.passed);
                CHECK(rep.diagonal_bias.passed);
                CHECK(rep.threshold_gap.passed);
                CHECK(rep.tail_slope_d.passed);
                CHECK(rep.tail_slope_a.passed);
                CHECK(rep.threshold_limit.passed);
                CHECK(rep.threshold_bounds.passed);
                CHECK(rep.closed_form_h.passed);
                CHECK(rep.all_passed());
            }
}

TEST_CASE("numeric index: deterministic client") {
    // a = 1, d = 3, lambda = p = 1: indifference at W = 3*4/2 = 6
    const double w = numeric_whittle(1, 3, ClientParams(1.0, 1.0), 20.0, 1e-4);
    CHECK(w == doctest::Approx(6.0).epsilon(1e-3));
    // d = 0: serving changes nothing, so the indifference point is W = 0 up to the bisection tolerance
    CHECK(numeric_whittle(1, 0, ClientParams(1.0, 1.0), 20.0, 1e-4) < 1e-4);
}

TEST_CASE("numeric index dominates the approximation") {
    for (double l : {0.3, 0.7})
        for (double p : {0.4, 0.9})
            for (std::int64_t a : {1, 3})
                for (std::int64_t d : {1, 4}) {
                    const ClientParams c(l, p);
                    const double approx = approx_index(a, d, c).w;
                    const double num = numeric_whittle(a, d, c, 2 * approx + 10, 1e-4);
                    CHECK(approx <= num + 1e-3);
                }
}

TEST_CASE("numeric index bracket failures") {
    try {
        numeric_whittle(1, 30, ClientParams(0.5, 0.5), 1.0, 1e-4);
        FAIL("expected a bracket error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::bracket);
    }
    CHECK_THROWS_AS(numeric_whittle(0, 1, ClientParams(0.5, 0.5), 10.0, 1e-4), Error);
    CHECK_THROWS_AS(numeric_whittle(1, 1, ClientParams(0.5, 0.5), -1.0, 1e-4), Error);
}
