#pragma once

#include <algorithm>
#include <cmath>

namespace regretlab {

// Comparison convention shared by certificates and inequality checkers:
// "measured <= bound" holds when bound - measured >= -1e-9 * max(1, |bound|).
inline constexpr double kRelSlack = 1e-9;

inline bool bound_holds(double measured, double bound) {
    return bound - measured >= -kRelSlack * std::max(1.0, std::abs(bound));
}

}  // namespace regretlab
