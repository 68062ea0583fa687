#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sim.hpp"

namespace aoi {

/// Parses the flat key-value experiment format:
///
///     # comment
///     [experiment]
///     name = tiny
///     horizon = 1000000
///     warmup = 100000        # optional, default 10% of horizon
///     seed = 7
///     replications = 4
///
///     [policy]
///     name = approx-index, round-robin   # one SimConfig per listed policy
///     tie = lowest                       # or random
///     age_cap = 16                       # optimal-table only
///
///     [clients]
///     (0.6, 0.9)                         # one client: (lambda, p)
///     20 x (0.2, 0.1)                    # group: count x (lambda, p)
///
/// Throws Error(parse) with the offending line number.
std::vector<SimConfig> parse_config(std::string_view text);

/// Compact client profile, e.g. "20x(0.2;0.1)+20x(0.2;0.5)"; consecutive equal
/// clients are grouped.
std::string client_profile(const std::vector<ClientParams>& clients);

}  // namespace aoi
