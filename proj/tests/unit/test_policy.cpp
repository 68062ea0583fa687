#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "index.hpp"
#include "joint.hpp"
#include "policy.hpp"
#include "random.hpp"

using namespace aoi;

namespace {

NetworkState net(const std::vector<ClientState>& s, const std::vector<ClientParams>& p, std::uint64_t t = 1) {
    return {s, p, t};
}

const KeyedStream kStream(1, 1, 0, Purpose::policy);

}  // namespace

TEST_CASE("all d = 0 means idle for every policy") {
    const std::vector<ClientState> s{ClientState(3, 3), ClientState(1, 1), ClientState(7, 7)};
    const std::vector<ClientParams> p(3, ClientParams(0.5, 0.5));
    const auto ns = net(s, p);
    CHECK(decide_approx_index(ns, TieRule::lowest_index).idle());
    CHECK(decide_arrival_aware(ns, TieRule::lowest_index).idle());
    CHECK(decide_max_age(ns).idle());
    CHECK(decide_round_robin(ns, std::nullopt).idle());
    CHECK(decide_random(ns, kStream).idle());
}

// lambda = p = 1 at a = 1: indices d(d+1)/2, so 6 beats 3
TEST_CASE("approx index picks the larger index") {
    const std::vector<ClientState> s{ClientState(1, 4), ClientState(1, 3)};
    const std::vector<ClientParams> p(2, ClientParams(1, 1));
    CHECK(decide_approx_index(net(s, p), TieRule::lowest_index) == PolicyDecision::serve(0));
    const std::vector<ClientState> r{ClientState(1, 3), ClientState(1, 4)};
    CHECK(decide_approx_index(net(r, p), TieRule::lowest_index) == PolicyDecision::serve(1));
}

TEST_CASE("identical clients in identical states") {
    const std::vector<ClientState> s(3, ClientState(2, 6));
    const std::vector<ClientParams> p(3, ClientParams(0.4, 0.7));
    CHECK(decide_approx_index(net(s, p), TieRule::lowest_index) == PolicyDecision::serve(0));
    // random ties spread over all leaders
    const KeyedStream tie(5, 1, ~0ULL, Purpose::tie);
    std::vector<int> hits(3, 0);
    for (std::uint64_t t = 1; t <= 3000; ++t) {
        const auto d = decide_approx_index(net(s, p, t), TieRule::uniform_random, &tie);
        REQUIRE(d.client.has_value());
        ++hits[*d.client];
    }
    for (int h : hits) CHECK(h > 800);
    CHECK_THROWS_AS(decide_approx_index(net(s, p), TieRule::uniform_random, nullptr), Error);
}

TEST_CASE("arrival-aware ignores the channel") {
    // both at (a=2, d=4): approx-index scores 0.9-client higher, arrival-aware sees equal indices
    const std::vector<ClientState> s(2, ClientState(2, 6));
    const std::vector<ClientParams> p{ClientParams(0.5, 0.9), ClientParams(0.5, 0.1)};
    CHECK(approx_index(2, 4, p[0]).w > approx_index(2, 4, p[1]).w);
    CHECK(approx_index(2, 4, ClientParams(0.5, 1)).w == approx_index(2, 4, ClientParams(0.5, 1)).w);
    CHECK(decide_approx_index(net(s, p), TieRule::lowest_index) == PolicyDecision::serve(0));
    CHECK(decide_arrival_aware(net(s, p), TieRule::lowest_index) == PolicyDecision::serve(0));
    // swap the clients: approx-index follows the good channel, arrival-aware stays on the lowest index
    const std::vector<ClientParams> q{p[1], p[0]};
    CHECK(decide_approx_index(net(s, q), TieRule::lowest_index) == PolicyDecision::serve(1));
    CHECK(decide_arrival_aware(net(s, q), TieRule::lowest_index) == PolicyDecision::serve(0));
}

TEST_CASE("single client with new data is always served") {
    const std::vector<ClientState> s{ClientState(4, 5)};
    const std::vector<ClientParams> p{ClientParams(0.3, 0.2)};
    CHECK(decide_arrival_aware(net(s, p), TieRule::lowest_index) == PolicyDecision::serve(0));
    CHECK(decide_approx_index(net(s, p), TieRule::lowest_index) == PolicyDecision::serve(0));
    CHECK(decide_max_age(net(s, p)) == PolicyDecision::serve(0));
    CHECK(decide_round_robin(net(s, p), 0) == PolicyDecision::serve(0));
    CHECK(decide_random(net(s, p), kStream) == PolicyDecision::serve(0));
}

TEST_CASE("index policies coincide when every channel is perfect") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::uniform_int_distribution<int> small(1, 20);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 2 + trial % 5;
        std::vector<ClientParams> p;
        std::vector<ClientState> s;
        for (std::size_t i = 0; i < n; ++i) {
            p.emplace_back(u(rng), 1.0);
            const int a = small(rng);
            s.emplace_back(a, a + small(rng) - 1);
        }
        REQUIRE(decide_approx_index(net(s, p), TieRule::lowest_index) ==
                decide_arrival_aware(net(s, p), TieRule::lowest_index));
    }
}

TEST_CASE("approx index decision is the argmax of the indices") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::uniform_int_distribution<int> small(1, 15);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + trial % 6;
        std::vector<ClientParams> p;
        std::vector<ClientState> s;
        for (std::size_t i = 0; i < n; ++i) {
            p.emplace_back(u(rng), u(rng));
            const int a = small(rng);
            s.emplace_back(a, a + small(rng) - 1);
        }
        // scaling every score by 3 must not move the argmax
        double best = 0.0;
        std::optional<std::size_t> pick;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 3.0 * approx_index(s[i].delay(), s[i].reduction(), p[i]).w;
            if (w > best) best = w, pick = i;
        }
        const auto d = decide_approx_index(net(s, p), TieRule::lowest_index);
        REQUIRE(d.client == pick);
        // at most one client, and only one with new data
        if (d.client) REQUIRE(s[*d.client].reduction() >= 1);
    }
}

TEST_CASE("baselines") {
    const std::vector<ClientParams> p(3, ClientParams(0.5, 0.5));
    SUBCASE("max-age takes the oldest client with new data") {
        const std::vector<ClientState> s{ClientState(8, 9), ClientState(3, 4)};
        const std::vector<ClientParams> q(2, ClientParams(0.5, 0.5));
        CHECK(decide_max_age(net(s, q)) == PolicyDecision::serve(0));
        const std::vector<ClientState> r{ClientState(1, 2), ClientState(20, 20), ClientState(1, 5)};
        CHECK(decide_max_age(net(r, p)) == PolicyDecision::serve(2));
    }
    SUBCASE("round-robin cycles and skips d = 0") {
        const std::vector<ClientState> s(3, ClientState(1, 3));
        CHECK(decide_round_robin(net(s, p), 1) == PolicyDecision::serve(2));
        CHECK(decide_round_robin(net(s, p), 2) == PolicyDecision::serve(0));
        CHECK(decide_round_robin(net(s, p), std::nullopt) == PolicyDecision::serve(0));
        const std::vector<ClientState> r{ClientState(1, 3), ClientState(2, 2), ClientState(1, 3)};
        CHECK(decide_round_robin(net(r, p), 0) == PolicyDecision::serve(2));
    }
    SUBCASE("random only picks clients with new data") {
        const std::vector<ClientState> s{ClientState(1, 3), ClientState(2, 2), ClientState(1, 3)};
        std::vector<int> hits(3, 0);
        for (std::uint64_t t = 1; t <= 4000; ++t) ++hits[*decide_random(net(s, p, t), kStream).client];
        CHECK(hits[1] == 0);
        CHECK(hits[0] > 1800);
        CHECK(hits[2] > 1800);
    }
}

TEST_CASE("policy objects") {
    CHECK(parse_policy_kind("approx-index") == PolicyKind::approx_index);
    CHECK(parse_policy_kind("optimal-table") == PolicyKind::optimal_table);
    CHECK_THROWS_AS(parse_policy_kind("greedy"), Error);
    for (auto k : {PolicyKind::approx_index, PolicyKind::arrival_aware, PolicyKind::max_age, PolicyKind::round_robin,
                   PolicyKind::random, PolicyKind::optimal_table})
        CHECK(parse_policy_kind(policy_name(k)) == k);

    PolicySpec spec;
    spec.tie = TieRule::uniform_random;
    CHECK(spec.label() == "approx-index/random-tie");
    spec.kind = PolicyKind::optimal_table;
    CHECK(spec.label() == "optimal-table/cap16");
    CHECK_THROWS_AS(make_policy(spec, 1, 1), Error);

    // the round-robin cursor lives in the instance
    PolicySpec rr;
    rr.kind = PolicyKind::round_robin;
    auto pol = make_policy(rr, 1, 1);
    const std::vector<ClientState> s(3, ClientState(1, 3));
    const std::vector<ClientParams> p(3, ClientParams(0.5, 0.5));
    CHECK(pol->decide(net(s, p)) == PolicyDecision::serve(0));
    CHECK(pol->decide(net(s, p)) == PolicyDecision::serve(1));
    CHECK(pol->decide(net(s, p)) == PolicyDecision::serve(2));
    CHECK(pol->decide(net(s, p)) == PolicyDecision::serve(0));
}

TEST_CASE("table policy mirrors and clamps") {
    const ClientParams c(0.5, 0.6);
    auto sol = solve_joint_optimal(JointProblem({c, c}, 8));
    auto table = std::make_shared<const JointPolicyTable>(sol.policy);
    const std::vector<ClientParams> p{c, c};
    const std::vector<ClientState> s{ClientState(2, 7), ClientState(1, 3)};
    const std::vector<ClientState> m{ClientState(1, 3), ClientState(2, 7)};
    const auto x = decide_from_table(*table, net(s, p));
    const auto y = decide_from_table(*table, net(m, p));
    REQUIRE(x.client.has_value());
    CHECK(*x.client == 1 - *y.client);
    CHECK(x.client == sol.policy.decide(s));
    // beyond the cap equals the clamped state, and clamping twice changes nothing
    const std::vector<ClientState> far{ClientState(30, 80), ClientState(1, 3)};
    const std::vector<ClientState> clamped{ClientState(8, 16), ClientState(1, 3)};
    CHECK(table->index_of(far) == table->index_of(clamped));
    CHECK(decide_from_table(*table, net(far, p)) == decide_from_table(*table, net(clamped, p)));
}
