#pragma once

#include <cstdint>

#include "model.hpp"

namespace aoi {

/// What a draw is used for; part of the stream key so different uses never
/// share randomness.
enum class Purpose : std::uint32_t {
    arrival = 0,
    channel = 1,
    policy = 2,
    tie = 3,
};

/// Counter-based random stream keyed by (seed, replication, client, purpose).
/// A draw is a pure function of the key and the slot number, so results do not
/// depend on evaluation order and two policies see the same arrivals.
class KeyedStream {
public:
    KeyedStream(std::uint64_t seed, std::uint64_t replication, std::uint64_t client, Purpose purpose) noexcept;

    std::uint64_t bits(std::uint64_t slot) const noexcept;
    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform(std::uint64_t slot) const noexcept;
    bool bernoulli(double prob, std::uint64_t slot) const noexcept { return uniform(slot) < prob; }
    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n, std::uint64_t slot) const noexcept;

private:
    std::uint64_t key_;
};

/// The two per-client sub-streams that realize a SlotOutcome.
struct ClientStreams {
    KeyedStream arrival;
    KeyedStream channel;

    static ClientStreams make(std::uint64_t seed, std::uint64_t replication, std::uint64_t client) noexcept {
        return {KeyedStream(seed, replication, client, Purpose::arrival),
                KeyedStream(seed, replication, client, Purpose::channel)};
    }
};

SlotOutcome sample_outcome(const ClientParams& params, const ClientStreams& streams, std::uint64_t slot) noexcept;

}  // namespace aoi
