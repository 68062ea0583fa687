#include "random.hpp"

namespace aoi {

namespace {

// splitmix64 finalizer
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

KeyedStream::KeyedStream(std::uint64_t seed, std::uint64_t replication, std::uint64_t client,
                         Purpose purpose) noexcept {
    std::uint64_t k = mix(seed);
    k = mix(k ^ replication);
    k = mix(k ^ client);
    k = mix(k ^ static_cast<std::uint64_t>(purpose));
    key_ = k;
}

std::uint64_t KeyedStream::bits(std::uint64_t slot) const noexcept {
    return mix(key_ ^ mix(slot));
}

double KeyedStream::uniform(std::uint64_t slot) const noexcept {
    return static_cast<double>(bits(slot) >> 11) * 0x1.0p-53;
}

std::uint64_t KeyedStream::below(std::uint64_t n, std::uint64_t slot) const noexcept {
    // multiply-shift; bias is below 2^-64 * n and irrelevant at these n
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(slot)) * n) >> 64);
}

SlotOutcome sample_outcome(const ClientParams& params, const ClientStreams& streams, std::uint64_t slot) noexcept {
    return {streams.arrival.bernoulli(params.lambda(), slot), streams.channel.bernoulli(params.p(), slot)};
}

}  // namespace aoi
