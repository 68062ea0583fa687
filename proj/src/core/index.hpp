#pragma once

#include <cstdint>
#include <span>

#include "model.hpp"

namespace aoi {

/// Expected slots per effective refresh opportunity: 1/lambda + (1-p)/p.
double delta(const ClientParams& params) noexcept;

/// Approximate Whittle index of state (a, d) together with the branch taken.
struct IndexValue {
    double w = 0.0;
    /// Auxiliary x = (d*Delta + a(a-1)/2) / (a-1+Delta); computed for both branches.
    double x = 0.0;
    bool quadratic = false;
    /// Both branch expressions, whichever was selected.
    double quadratic_branch = 0.0;
    double linear_branch = 0.0;
    /// Branch test d*Delta/a >= (a-1)/2 + Delta, both sides.
    double condition_lhs = 0.0;
    double condition_rhs = 0.0;
};

/// Throws Error(invalid_argument) for a < 1 or d < 0.
IndexValue approx_index(std::int64_t a, std::int64_t d, const ClientParams& params);

/// Upper bound on the first threshold D_1 at subsidy W.
double d1_upper(double subsidy, const ClientParams& params);

/// Limiting threshold lambda W / (lambda + p - p lambda).
double dstar(double subsidy, const ClientParams& params);

/// Piecewise upper bound on the threshold D_a; uses d1_upper for D_1.
double threshold_upper(std::int64_t a, double subsidy, const ClientParams& params);

struct ThresholdBounds {
    double d1_upper = 0.0;
    double dstar = 0.0;
    double subsidy = 0.0;
    double delta = 1.0;
    double p = 1.0;

    static ThresholdBounds make(double subsidy, const ClientParams& params);
    double per_a_upper(std::int64_t a) const;
};

/// (1/(2N)) (sum_i 1/sqrt(p_i))^2 + 1/2 over the channel probabilities.
double lower_bound(std::span<const double> success_probs);

}  // namespace aoi
