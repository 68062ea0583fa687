#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "model.hpp"

using namespace aoi;

TEST_CASE("client params are validated") {
    CHECK_NOTHROW(ClientParams(1.0, 1.0));
    CHECK_NOTHROW(ClientParams(1e-6, 0.3));
    CHECK_THROWS_AS(ClientParams(0.0, 0.5), Error);
    CHECK_THROWS_AS(ClientParams(0.5, 0.0), Error);
    CHECK_THROWS_AS(ClientParams(1.5, 0.5), Error);
    CHECK_THROWS_AS(ClientParams(0.5, -0.1), Error);
    CHECK_THROWS_AS(ClientParams(std::nan(""), 0.5), Error);
    CHECK_THROWS_AS(ClientParams(0.5, std::numeric_limits<double>::infinity()), Error);
    try {
        ClientParams(0.5, 2.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_argument);
    }
}

TEST_CASE("client state requires 1 <= a <= A") {
    ClientState s;
    CHECK(s.delay() == 1);
    CHECK(s.age() == 1);
    CHECK(s.reduction() == 0);
    CHECK_NOTHROW(ClientState(3, 7));
    CHECK(ClientState(3, 7).reduction() == 4);
    CHECK_THROWS_AS(ClientState(0, 4), Error);
    CHECK_THROWS_AS(ClientState(5, 4), Error);
}

TEST_CASE("one-slot transitions") {
    const ClientState s(3, 7);
    SUBCASE("idle, no arrival: both grow") {
        CHECK(step_client(s, false, {false, false}) == ClientState(4, 8));
    }
    SUBCASE("idle with arrival: buffer replaced") {
        CHECK(step_client(s, false, {true, false}) == ClientState(1, 8));
    }
    SUBCASE("scheduled, channel fails") {
        CHECK(step_client(s, true, {false, false}) == ClientState(4, 8));
    }
    SUBCASE("delivered, no arrival: age drops to the delivered delay") {
        const auto n = step_client(s, true, {false, true});
        CHECK(n == ClientState(4, 4));
        CHECK(n.reduction() == 0);
    }
    SUBCASE("delivered and a fresh arrival") {
        CHECK(step_client(s, true, {true, true}) == ClientState(1, 4));
    }
    SUBCASE("channel bit ignored when not scheduled") {
        CHECK(step_client(s, false, {false, true}) == ClientState(4, 8));
    }
}

TEST_CASE("random trajectories keep 1 <= a <= A and d >= 0") {
    std::mt19937_64 rng(12345);
    std::bernoulli_distribution coin(0.5);
    ClientState s;
    for (int t = 0; t < 100000; ++t) {
        const bool sched = coin(rng);
        const SlotOutcome o{coin(rng), coin(rng)};
        const auto prev = s;
        s = step_client(s, sched, o);
        REQUIRE(s.delay() >= 1);
        REQUIRE(s.delay() <= s.age());
        REQUIRE(s.reduction() >= 0);
        // AoI grows by exactly one unless a delivery happened
        if (!(sched && o.channel))
            REQUIRE(s.age() == prev.age() + 1);
        else
            REQUIRE(s.age() == prev.delay() + 1);
    }
}

TEST_CASE("average over a trace") {
    const std::vector<std::uint64_t> trace{1, 2, 3, 4, 5, 6};
    CHECK(average_aoi(trace, 1) == doctest::Approx(3.5));
    CHECK(average_aoi(trace, 2) == doctest::Approx(1.75));
    CHECK_THROWS_AS(average_aoi(std::vector<std::uint64_t>{}, 1), Error);
    CHECK_THROWS_AS(average_aoi(trace, 0), Error);
}
