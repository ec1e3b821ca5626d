#pragma once

#include <utility>
#include <vector>

namespace srf {

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of log(rms) on log(n). Needs at least three points,
/// all coordinates positive; throws std::invalid_argument otherwise.
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace srf
