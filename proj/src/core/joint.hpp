#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "model.hpp"
#include "oracle.hpp"

namespace aoi {

/// Exact joint scheduling problem for one or two clients, each truncated to
/// a, d <= age_cap.
class JointProblem {
public:
    JointProblem(std::vector<ClientParams> clients, std::int64_t age_cap);

    const std::vector<ClientParams>& clients() const noexcept { return clients_; }
    std::int64_t age_cap() const noexcept { return age_cap_; }

private:
    std::vector<ClientParams> clients_;
    std::int64_t age_cap_;
};

/// Optimal decision per joint state; states outside the cap are clamped.
class JointPolicyTable {
public:
    JointPolicyTable() = default;
    JointPolicyTable(std::size_t clients, std::int64_t age_cap, std::vector<std::int8_t> decisions);

    std::size_t clients() const noexcept { return clients_; }
    std::int64_t age_cap() const noexcept { return age_cap_; }

    /// Client to serve, or nullopt to idle. Throws if states.size() != clients().
    std::optional<std::size_t> decide(std::span<const ClientState> states) const;

    /// Flat index of the joint state after clamping each client into the cap.
    std::size_t index_of(std::span<const ClientState> states) const;
    std::size_t size() const noexcept { return decisions_.size(); }
    std::int8_t raw(std::size_t index) const noexcept { return decisions_[index]; }

private:
    std::size_t clients_ = 0;
    std::int64_t age_cap_ = 0;
    std::vector<std::int8_t> decisions_;  // -1 idle, else client index
};

struct JointSolution {
    /// Optimal long-run average AoI per client (J_opt / N).
    double average_aoi = 0.0;
    JointPolicyTable policy;
    std::int64_t iterations = 0;
    double final_span = 0.0;
    /// The optimal policy idles in some state on the age-cap boundary.
    bool saturated = false;
};

/// Relative value iteration over the product state space with actions
/// {idle, serve client i}. Per-slot cost is the sum of start-of-slot AoIs.
JointSolution solve_joint_optimal(const JointProblem& prob, const SolveOptions& opts = {});

}  // namespace aoi
