#include "policy.hpp"

#include <vector>

#include "error.hpp"
#include "index.hpp"

namespace aoi {

namespace {

constexpr std::uint64_t kPolicyStreamClient = ~0ULL;

// Argmax over clients of score(i); idle when the maximum is zero.
template <class Score>
PolicyDecision argmax_decision(const NetworkState& ns, TieRule tie, const KeyedStream* tie_stream, Score score) {
    double best = 0.0;
    std::vector<std::size_t> leaders;
    for (std::size_t i = 0; i < ns.states.size(); ++i) {
        const double v = score(i);
        if (v > best) {
            best = v;
            leaders.assign(1, i);
        } else if (v == best && best > 0.0) {
            leaders.push_back(i);
        }
    }
    if (leaders.empty()) return PolicyDecision::idle_slot();
    if (tie == TieRule::uniform_random && leaders.size() > 1) {
        if (!tie_stream) fail(ErrorCode::invalid_argument, "uniform-random tie rule needs a random stream");
        return PolicyDecision::serve(leaders[tie_stream->below(leaders.size(), ns.t)]);
    }
    return PolicyDecision::serve(leaders.front());
}

void check_state(const NetworkState& ns) {
    if (ns.states.size() != ns.params.size())
        fail(ErrorCode::invalid_argument, "network state has mismatched client and parameter counts");
}

class IndexPolicy final : public Policy {
public:
    IndexPolicy(PolicyKind kind, TieRule tie, KeyedStream tie_stream)
        : kind_(kind), tie_(tie), tie_stream_(tie_stream) {}

    PolicyDecision decide(const NetworkState& ns) override {
        return kind_ == PolicyKind::approx_index ? decide_approx_index(ns, tie_, &tie_stream_)
                                                 : decide_arrival_aware(ns, tie_, &tie_stream_);
    }
    PolicyKind kind() const noexcept override { return kind_; }

private:
    PolicyKind kind_;
    TieRule tie_;
    KeyedStream tie_stream_;
};

class MaxAgePolicy final : public Policy {
public:
    PolicyDecision decide(const NetworkState& ns) override { return decide_max_age(ns); }
    PolicyKind kind() const noexcept override { return PolicyKind::max_age; }
};

class RoundRobinPolicy final : public Policy {
public:
    PolicyDecision decide(const NetworkState& ns) override {
        auto d = decide_round_robin(ns, last_);
        if (d.client) last_ = d.client;
        return d;
    }
    PolicyKind kind() const noexcept override { return PolicyKind::round_robin; }

private:
    std::optional<std::size_t> last_;
};

class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(KeyedStream stream) : stream_(stream) {}
    PolicyDecision decide(const NetworkState& ns) override { return decide_random(ns, stream_); }
    PolicyKind kind() const noexcept override { return PolicyKind::random; }

private:
    KeyedStream stream_;
};

class TablePolicy final : public Policy {
public:
    explicit TablePolicy(std::shared_ptr<const JointPolicyTable> table) : table_(std::move(table)) {}
    PolicyDecision decide(const NetworkState& ns) override { return decide_from_table(*table_, ns); }
    PolicyKind kind() const noexcept override { return PolicyKind::optimal_table; }

private:
    std::shared_ptr<const JointPolicyTable> table_;
};

}  // namespace

std::string_view policy_name(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::approx_index:
            return "approx-index";
        case PolicyKind::arrival_aware:
            return "arrival-aware";
        case PolicyKind::max_age:
            return "max-age";
        case PolicyKind::round_robin:
            return "round-robin";
        case PolicyKind::random:
            return "random";
        case PolicyKind::optimal_table:
            return "optimal-table";
    }
    return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
    for (auto k : {PolicyKind::approx_index, PolicyKind::arrival_aware, PolicyKind::max_age, PolicyKind::round_robin,
                   PolicyKind::random, PolicyKind::optimal_table})
        if (policy_name(k) == name) return k;
    fail(ErrorCode::invalid_argument, "unknown policy '" + std::string(name) + "'");
}

std::string PolicySpec::label() const {
    std::string s(policy_name(kind));
    if (tie == TieRule::uniform_random && (kind == PolicyKind::approx_index || kind == PolicyKind::arrival_aware))
        s += "/random-tie";
    if (kind == PolicyKind::optimal_table) s += "/cap" + std::to_string(age_cap);
    return s;
}

PolicyDecision decide_approx_index(const NetworkState& ns, TieRule tie, const KeyedStream* tie_stream) {
    check_state(ns);
    return argmax_decision(ns, tie, tie_stream, [&](std::size_t i) {
        return approx_index(ns.states[i].delay(), ns.states[i].reduction(), ns.params[i]).w;
    });
}

PolicyDecision decide_arrival_aware(const NetworkState& ns, TieRule tie, const KeyedStream* tie_stream) {
    check_state(ns);
    return argmax_decision(ns, tie, tie_stream, [&](std::size_t i) {
        const ClientParams reliable(ns.params[i].lambda(), 1.0);
        return approx_index(ns.states[i].delay(), ns.states[i].reduction(), reliable).w;
    });
}

PolicyDecision decide_max_age(const NetworkState& ns) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < ns.states.size(); ++i) {
        if (ns.states[i].reduction() < 1) continue;
        if (!pick || ns.states[i].age() > ns.states[*pick].age()) pick = i;
    }
    return {pick};
}

PolicyDecision decide_round_robin(const NetworkState& ns, std::optional<std::size_t> last_served) {
    const std::size_t n = ns.states.size();
    if (n == 0) return PolicyDecision::idle_slot();
    const std::size_t start = last_served ? (*last_served + 1) % n : 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = (start + k) % n;
        if (ns.states[i].reduction() >= 1) return PolicyDecision::serve(i);
    }
    return PolicyDecision::idle_slot();
}

PolicyDecision decide_random(const NetworkState& ns, const KeyedStream& stream) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < ns.states.size(); ++i)
        if (ns.states[i].reduction() >= 1) eligible.push_back(i);
    if (eligible.empty()) return PolicyDecision::idle_slot();
    return PolicyDecision::serve(eligible[stream.below(eligible.size(), ns.t)]);
}

PolicyDecision decide_from_table(const JointPolicyTable& table, const NetworkState& ns) {
    return {table.decide(ns.states)};
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::uint64_t seed, std::uint64_t replication) {
    switch (spec.kind) {
        case PolicyKind::approx_index:
        case PolicyKind::arrival_aware:
            return std::make_unique<IndexPolicy>(spec.kind, spec.tie,
                                                 KeyedStream(seed, replication, kPolicyStreamClient, Purpose::tie));
        case PolicyKind::max_age:
            return std::make_unique<MaxAgePolicy>();
        case PolicyKind::round_robin:
            return std::make_unique<RoundRobinPolicy>();
        case PolicyKind::random:
            return std::make_unique<RandomPolicy>(KeyedStream(seed, replication, kPolicyStreamClient, Purpose::policy));
        case PolicyKind::optimal_table:
            if (!spec.table) fail(ErrorCode::invalid_argument, "optimal-table policy needs a solved table");
            return std::make_unique<TablePolicy>(spec.table);
    }
    fail(ErrorCode::internal, "unhandled policy kind");
}

}  // namespace aoi
