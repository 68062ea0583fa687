#include "joint.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

#include "error.hpp"

namespace aoi {

namespace {

// Per-client truncated chain: state (a, d), a in 1..cap, d in 0..cap.
struct ClientChain {
    std::int64_t cap;
    std::int64_t width;  // cap + 1

    std::int64_t count() const noexcept { return cap * width; }
    std::int64_t index(std::int64_t a, std::int64_t d) const noexcept {
        return (std::min(a, cap) - 1) * width + std::min(d, cap);
    }
};

struct Branch {
    std::int64_t next;
    double prob;
};

// Successors of one client given whether it is served.
std::array<Branch, 4> successors(const ClientChain& c, const ClientParams& cp, std::int64_t a, std::int64_t d,
                                 bool served, int& n) {
    std::array<Branch, 4> out{};
    n = 0;
    const double l = cp.lambda();
    const double p = served ? cp.p() : 0.0;
    auto add = [&](std::int64_t na, std::int64_t nd, double pr) {
        if (pr > 0.0) out[static_cast<std::size_t>(n++)] = {c.index(na, nd), pr};
    };
    add(a + 1, d, (1.0 - l) * (1.0 - p));
    add(1, a + d, l * (1.0 - p));
    add(1, a, l * p);
    add(a + 1, 0, (1.0 - l) * p);
    return out;
}

}  // namespace

JointProblem::JointProblem(std::vector<ClientParams> clients, std::int64_t age_cap)
    : clients_(std::move(clients)), age_cap_(age_cap) {
    if (clients_.empty() || clients_.size() > 2)
        fail(ErrorCode::invalid_argument,
             "joint problem supports 1 or 2 clients, got " + std::to_string(clients_.size()));
    if (age_cap < 4) fail(ErrorCode::invalid_argument, "age_cap must be >= 4");
}

JointPolicyTable::JointPolicyTable(std::size_t clients, std::int64_t age_cap, std::vector<std::int8_t> decisions)
    : clients_(clients), age_cap_(age_cap), decisions_(std::move(decisions)) {}

std::size_t JointPolicyTable::index_of(std::span<const ClientState> states) const {
    if (states.size() != clients_)
        fail(ErrorCode::invalid_argument,
             "policy table built for " + std::to_string(clients_) + " clients, got " + std::to_string(states.size()));
    const ClientChain c{age_cap_, age_cap_ + 1};
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (const auto& s : states) {
        idx += stride * static_cast<std::size_t>(c.index(s.delay(), s.reduction()));
        stride *= static_cast<std::size_t>(c.count());
    }
    return idx;
}

std::optional<std::size_t> JointPolicyTable::decide(std::span<const ClientState> states) const {
    const auto v = decisions_.at(index_of(states));
    if (v < 0) return std::nullopt;
    return static_cast<std::size_t>(v);
}

JointSolution solve_joint_optimal(const JointProblem& prob, const SolveOptions& opts) {
    if (!(opts.tol > 0.0)) fail(ErrorCode::invalid_argument, "solver tolerance must be positive");
    const auto& cl = prob.clients();
    const std::size_t n = cl.size();
    const ClientChain chain{prob.age_cap(), prob.age_cap() + 1};
    const std::int64_t per = chain.count();
    const std::int64_t total = n == 1 ? per : per * per;
    const double tau = opts.damping;

    struct Succ {
        std::array<Branch, 4> b;
        int n;
    };
    std::vector<double> age(static_cast<std::size_t>(per));
    std::vector<std::vector<std::array<Succ, 2>>> tables(
        n, std::vector<std::array<Succ, 2>>(static_cast<std::size_t>(per)));
    for (std::int64_t a = 1; a <= chain.cap; ++a) {
        for (std::int64_t d = 0; d <= chain.cap; ++d) {
            const auto i = static_cast<std::size_t>(chain.index(a, d));
            age[i] = static_cast<double>(a + d);
            for (std::size_t c = 0; c < n; ++c) {
                for (int served = 0; served < 2; ++served) {
                    auto& sc = tables[c][i][static_cast<std::size_t>(served)];
                    sc.b = successors(chain, cl[c], a, d, served != 0, sc.n);
                }
            }
        }
    }

    const int actions = static_cast<int>(n) + 1;  // 0 idle, k serve client k-1
    auto q_value = [&](const std::vector<double>& h, std::int64_t s, int act) {
        if (n == 1) {
            const auto& sc = tables[0][static_cast<std::size_t>(s)][act == 1 ? 1 : 0];
            double e = 0.0;
            for (int k = 0; k < sc.n; ++k) e += sc.b[k].prob * h[static_cast<std::size_t>(sc.b[k].next)];
            return age[static_cast<std::size_t>(s)] + e;
        }
        const auto s0 = static_cast<std::size_t>(s % per);
        const auto s1 = static_cast<std::size_t>(s / per);
        const auto& c0 = tables[0][s0][act == 1 ? 1 : 0];
        const auto& c1 = tables[1][s1][act == 2 ? 1 : 0];
        double e = 0.0;
        for (int j = 0; j < c1.n; ++j) {
            const auto base = c1.b[j].next * per;
            double inner = 0.0;
            for (int k = 0; k < c0.n; ++k) inner += c0.b[k].prob * h[static_cast<std::size_t>(base + c0.b[k].next)];
            e += c1.b[j].prob * inner;
        }
        return age[s0] + age[s1] + e;
    };

    const std::int64_t ref_state = 0;  // every client at (1, 0)
    std::vector<double> h(static_cast<std::size_t>(total), 0.0), next(h.size());
    double span = std::numeric_limits<double>::infinity();
    std::int64_t iter = 0;
    bool converged = false;
    while (iter < opts.max_iter) {
        ++iter;
        double ref = std::numeric_limits<double>::infinity();
        for (int act = 0; act < actions; ++act) ref = std::min(ref, q_value(h, ref_state, act));
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::int64_t s = 0; s < total; ++s) {
            double best = std::numeric_limits<double>::infinity();
            for (int act = 0; act < actions; ++act) best = std::min(best, q_value(h, s, act));
            const auto i = static_cast<std::size_t>(s);
            const double v = (1.0 - tau) * h[i] + tau * (best - ref);
            const double diff = v - h[i];
            lo = std::min(lo, diff);
            hi = std::max(hi, diff);
            next[i] = v;
        }
        std::swap(h, next);
        span = hi - lo;
        if (span < opts.tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        fail(ErrorCode::no_convergence, "joint value iteration did not converge in " + std::to_string(opts.max_iter) +
                                            " iterations (final span " + std::to_string(span) + ")");

    JointSolution out;
    double j = std::numeric_limits<double>::infinity();
    for (int act = 0; act < actions; ++act) j = std::min(j, q_value(h, ref_state, act));
    j -= h[static_cast<std::size_t>(ref_state)];
    out.average_aoi = j / static_cast<double>(n);
    out.iterations = iter;
    out.final_span = span;

    std::vector<std::int8_t> decisions(static_cast<std::size_t>(total), -1);
    for (std::int64_t s = 0; s < total; ++s) {
        // serving wins ties against idling and lower client index wins ties between clients, but a client
        // with d = 0 is never served: that transmission is identical to idling
        auto reduction = [&](std::size_t c) { return (c == 0 ? s % per : s / per) % chain.width; };
        std::array<double, 3> q{};
        double best = std::numeric_limits<double>::infinity();
        for (int act = 0; act < actions; ++act) {
            q[static_cast<std::size_t>(act)] = q_value(h, s, act);
            best = std::min(best, q[static_cast<std::size_t>(act)]);
        }
        int best_act = 0;
        for (int act = 1; act < actions; ++act) {
            if (reduction(static_cast<std::size_t>(act - 1)) > 0 &&
                q[static_cast<std::size_t>(act)] <= best + opts.tie_tolerance) {
                best_act = act;
                break;
            }
        }
        decisions[static_cast<std::size_t>(s)] = static_cast<std::int8_t>(best_act - 1);
        if (best_act == 0) {
            // idling is only a truncation concern when some client sits on the cap with something to deliver
            for (std::size_t c = 0; c < n; ++c) {
                const std::int64_t a = (c == 0 ? s % per : s / per) / chain.width + 1;
                const std::int64_t d = reduction(c);
                if (d > 0 && (a == chain.cap || d == chain.cap)) out.saturated = true;
            }
        }
    }
    out.policy = JointPolicyTable(n, prob.age_cap(), std::move(decisions));
    return out;
}

}  // namespace aoi
