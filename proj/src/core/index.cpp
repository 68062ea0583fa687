#include "index.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace aoi {

namespace {

void check_subsidy(double subsidy) {
    if (!(subsidy >= 0.0) || !std::isfinite(subsidy))
        fail(ErrorCode::invalid_argument, "subsidy must be a finite nonnegative number");
}

}  // namespace

double delta(const ClientParams& params) noexcept {
    return 1.0 / params.lambda() + (1.0 - params.p()) / params.p();
}

IndexValue approx_index(std::int64_t a, std::int64_t d, const ClientParams& params) {
    if (a < 1) fail(ErrorCode::invalid_argument, "queuing delay a must be >= 1");
    if (d < 0) fail(ErrorCode::invalid_argument, "AoI reduction d must be >= 0");

    const double p = params.p();
    const double dl = delta(params);
    const double ad = static_cast<double>(a);
    const double dd = static_cast<double>(d);

    IndexValue v;
    v.condition_lhs = dd * dl / ad;
    v.condition_rhs = (ad - 1.0) / 2.0 + dl;
    v.x = (dd * dl + ad * (ad - 1.0) / 2.0) / (ad - 1.0 + dl);
    v.quadratic = v.condition_lhs >= v.condition_rhs;
    v.quadratic_branch = p / 2.0 * v.x * v.x + p * (dl - 0.5) * v.x;
    v.linear_branch = p * dd * dl;
    v.w = v.quadratic ? v.quadratic_branch : v.linear_branch;
    return v;
}

double d1_upper(double subsidy, const ClientParams& params) {
    check_subsidy(subsidy);
    const double shift = delta(params) - 0.5;
    return std::sqrt(2.0 * subsidy / params.p() + shift * shift) - shift;
}

double dstar(double subsidy, const ClientParams& params) {
    check_subsidy(subsidy);
    const double l = params.lambda();
    const double p = params.p();
    return l * subsidy / (l + p - p * l);
}

ThresholdBounds ThresholdBounds::make(double subsidy, const ClientParams& params) {
    ThresholdBounds b;
    b.d1_upper = aoi::d1_upper(subsidy, params);
    b.dstar = aoi::dstar(subsidy, params);
    b.subsidy = subsidy;
    b.delta = aoi::delta(params);
    b.p = params.p();
    return b;
}

double ThresholdBounds::per_a_upper(std::int64_t a) const {
    if (a < 1) fail(ErrorCode::invalid_argument, "queuing delay a must be >= 1");
    const double ad = static_cast<double>(a);
    const double limit = subsidy / (p * delta);
    // a = 1 always takes the first case, where it reduces to D_1 itself.
    if (a == 1) return d1_upper;
    if (ad <= d1_upper) {
        return (ad - 1.0) / delta * (subsidy / (p * d1_upper) + (d1_upper + 1.0 - ad) / 2.0 - delta) + d1_upper;
    }
    return limit;
}

double threshold_upper(std::int64_t a, double subsidy, const ClientParams& params) {
    return ThresholdBounds::make(subsidy, params).per_a_upper(a);
}

double lower_bound(std::span<const double> success_probs) {
    if (success_probs.empty()) fail(ErrorCode::invalid_argument, "lower bound needs at least one client");
    double sum = 0.0;
    for (double p : success_probs) {
        if (!(p > 0.0 && p <= 1.0))
            fail(ErrorCode::invalid_argument,
                 "channel success probability must lie in (0,1], got " + std::to_string(p));
        sum += 1.0 / std::sqrt(p);
    }
    const double n = static_cast<double>(success_probs.size());
    return sum * sum / (2.0 * n) + 0.5;
}

}  // namespace aoi
