#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "joint.hpp"
#include "model.hpp"
#include "random.hpp"

namespace aoi {

struct NetworkState {
    std::span<const ClientState> states;
    std::span<const ClientParams> params;
    /// 1-based slot counter.
    std::uint64_t t = 1;
};

/// At most one client per slot; an empty choice means the base station idles.
struct PolicyDecision {
    std::optional<std::size_t> client;

    bool idle() const noexcept { return !client.has_value(); }
    static PolicyDecision idle_slot() noexcept { return {}; }
    static PolicyDecision serve(std::size_t i) noexcept { return {i}; }
    friend bool operator==(const PolicyDecision&, const PolicyDecision&) = default;
};

enum class TieRule { lowest_index, uniform_random };

enum class PolicyKind { approx_index, arrival_aware, max_age, round_robin, random, optimal_table };

std::string_view policy_name(PolicyKind kind) noexcept;
/// Throws Error(invalid_argument) for unknown names.
PolicyKind parse_policy_kind(std::string_view name);

/// `tie_stream` is only consulted for TieRule::uniform_random.
PolicyDecision decide_approx_index(const NetworkState& ns, TieRule tie, const KeyedStream* tie_stream = nullptr);

/// Same index path with every client treated as p = 1.
PolicyDecision decide_arrival_aware(const NetworkState& ns, TieRule tie, const KeyedStream* tie_stream = nullptr);

PolicyDecision decide_max_age(const NetworkState& ns);
PolicyDecision decide_round_robin(const NetworkState& ns, std::optional<std::size_t> last_served);
PolicyDecision decide_random(const NetworkState& ns, const KeyedStream& stream);
PolicyDecision decide_from_table(const JointPolicyTable& table, const NetworkState& ns);

/// Per-replication policy instance; owns any cursor state.
class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyDecision decide(const NetworkState& ns) = 0;
    virtual PolicyKind kind() const noexcept = 0;
};

struct PolicySpec {
    PolicyKind kind = PolicyKind::approx_index;
    TieRule tie = TieRule::lowest_index;
    /// Truncation for optimal-table.
    std::int64_t age_cap = 16;
    /// Solved table for optimal-table; filled lazily by the simulator.
    std::shared_ptr<const JointPolicyTable> table;

    std::string label() const;
};

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::uint64_t seed, std::uint64_t replication);

}  // namespace aoi
