#include "model.hpp"

#include <string>

#include "error.hpp"

namespace aoi {

ClientParams::ClientParams(double lambda, double p) : lambda_(lambda), p_(p) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        fail(ErrorCode::invalid_argument, "arrival probability must lie in (0,1], got " + std::to_string(lambda));
    if (!(p > 0.0 && p <= 1.0))
        fail(ErrorCode::invalid_argument, "channel success probability must lie in (0,1], got " + std::to_string(p));
}

ClientState::ClientState(std::int64_t delay, std::int64_t age) : delay_(delay), age_(age) {
    if (delay < 1 || age < delay)
        fail(ErrorCode::invalid_argument,
             "client state needs 1 <= a <= A, got a=" + std::to_string(delay) + " A=" + std::to_string(age));
}

ClientState step_client(const ClientState& s, bool scheduled, SlotOutcome o) noexcept {
    ClientState next = s;
    next.age_ = (scheduled && o.channel) ? s.delay_ + 1 : s.age_ + 1;
    next.delay_ = o.arrival ? 1 : s.delay_ + 1;
    return next;
}

double average_aoi(std::span<const std::uint64_t> trace, std::size_t clients) {
    if (trace.empty()) fail(ErrorCode::invalid_argument, "average_aoi needs a nonempty trace");
    if (clients == 0) fail(ErrorCode::invalid_argument, "average_aoi needs at least one client");
    long double total = 0;
    for (auto v : trace) total += static_cast<long double>(v);
    return static_cast<double>(total / (static_cast<long double>(trace.size()) * clients));
}

}  // namespace aoi
