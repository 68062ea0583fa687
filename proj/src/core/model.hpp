#pragma once

#include <cstdint>
#include <span>

namespace aoi {

/// Largest horizon (in slots) accepted anywhere; ages stay far below int64 range.
inline constexpr std::uint64_t kMaxHorizon = 1'000'000'000ULL;

struct SlotOutcome;

/// Per-client arrival probability (lambda) and channel success probability (p).
class ClientParams {
public:
    /// Throws Error(invalid_argument) unless 0 < lambda <= 1 and 0 < p <= 1.
    ClientParams(double lambda, double p);

    double lambda() const noexcept { return lambda_; }
    double p() const noexcept { return p_; }

    friend bool operator==(const ClientParams&, const ClientParams&) = default;

private:
    double lambda_;
    double p_;
};

/// Queuing delay `a` of the freshest buffered packet and AoI `A` at the client.
/// Invariant: 1 <= a <= A. The buffer is never empty; after a delivery the
/// delivered packet stays buffered with d = A - a = 0.
class ClientState {
public:
    ClientState() = default;
    ClientState(std::int64_t delay, std::int64_t age);

    std::int64_t delay() const noexcept { return delay_; }
    std::int64_t age() const noexcept { return age_; }
    /// AoI reduction a successful delivery would achieve (d = A - a).
    std::int64_t reduction() const noexcept { return age_ - delay_; }

    friend bool operator==(const ClientState&, const ClientState&) = default;

private:
    friend ClientState step_client(const ClientState&, bool, SlotOutcome) noexcept;

    std::int64_t delay_ = 1;
    std::int64_t age_ = 1;
};

/// Realized randomness of one slot for one client.
struct SlotOutcome {
    bool arrival = false;
    bool channel = false;
};

/// One slot of the one-buffer dynamics: scheduling acts first, the arrival lands
/// at the end of the slot.
ClientState step_client(const ClientState& s, bool scheduled, SlotOutcome o) noexcept;

/// (1 / (T N)) * sum_t trace[t]; trace holds per-slot network AoI sums.
double average_aoi(std::span<const std::uint64_t> trace, std::size_t clients);

}  // namespace aoi
