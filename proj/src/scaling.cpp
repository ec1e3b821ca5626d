#include "srf/scaling.hpp"

#include <cmath>
#include <stdexcept>

namespace srf {

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("scaling_fit needs at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [n, rms] : points) {
        if (!(n > 0.0) || !(rms > 0.0)) throw std::invalid_argument("scaling_fit needs positive values");
        sx += std::log(n);
        sy += std::log(rms);
    }
    const double count = double(points.size());
    const double mx = sx / count;
    const double my = sy / count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, rms] : points) {
        const double dx = std::log(n) - mx;
        const double dy = std::log(rms) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("scaling_fit needs at least two distinct n");
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    // A flat series is fit exactly by a zero slope.
    fit.r_squared = syy <= 1e-28 * count ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace srf
