#pragma once

#include "srf/eve.hpp"
#include "srf/rng.hpp"
#include "srf/su2.hpp"

#include <array>
#include <cstdint>

namespace srf {

enum class Outcome { up, down };

/// Counts N(outcome, secret bit) for one Bob axis.
struct MeasurementTally {
    std::int64_t up_bit0 = 0;
    std::int64_t down_bit0 = 0;
    std::int64_t up_bit1 = 0;
    std::int64_t down_bit1 = 0;

    std::int64_t total() const { return up_bit0 + down_bit0 + up_bit1 + down_bit1; }
    /// Spins whose outcome agrees with the secret bit (up for 0, down for 1).
    std::int64_t matches() const { return up_bit0 + down_bit1; }
    void record(Outcome o, int bit);
};

struct AngleEstimate {
    double p_bar = 0.0;
    double theta_hat = 0.0;
    double delta_theta = 0.0;       // propagated rms error at theta_hat
    double delta_theta_large_n = 0.0;  // 1/sqrt(N)
};

/// p(up) = cos^2(theta/2) with cos(theta) = prep . meas.
template <typename G>
Outcome qubit_outcome(const Vec3& prep_dir, const Vec3& meas_dir, G& rng) {
    const double p_up = 0.5 * (1.0 + prep_dir.dot(meas_dir));
    return bernoulli(rng, p_up) ? Outcome::up : Outcome::down;
}

/// Throws std::invalid_argument for an empty tally.
AngleEstimate estimate_angle(const MeasurementTally& tally);

struct SeparableParams {
    std::int64_t n_per_axis = 10000;
    double k_sigma = 5.0;
};

struct DirectionResult {
    Vec3 direction = Vec3::UnitZ();   // Bob's estimate of Alice's z axis, his frame
    Vec3 truth = Vec3::UnitZ();
    double error_angle = 0.0;         // angle between direction and truth
    double overall_error = 0.0;       // sum of the three per-axis angle errors
    std::array<AngleEstimate, 3> axes{};
    std::array<double, 3> true_angles{};
    double cos2_sum = 0.0;
    double alarm_statistic = 0.0;     // |sum cos^2 - 1 - bias| / sigma
    bool alarm = false;
    bool degenerate = false;
};

/// true_rotation maps Alice's frame into Bob's: her z axis is true_rotation.rotate(z).
DirectionResult run_separable(const SeparableParams& params, const Rotation& true_rotation,
                              const EveModel& eve, Rng& rng);

/// Per-axis estimate for a single Bob axis at a fixed angle theta to Alice's axis.
AngleEstimate run_single_axis(std::int64_t n, double theta, const EveModel& eve, Rng& rng);

struct PlanarResult {
    double angle_hat = 0.0;        // in-plane polarization angle, [0, pi)
    double truth = 0.0;
    double direction_error = 0.0;  // |angle_hat - truth| folded mod pi, in [0, pi/2]
    double overall_error = 0.0;    // sum of the two per-axis Bloch-angle errors
    std::array<AngleEstimate, 2> axes{};
};

/// Photon-polarization variant: analyzers at 0 and 45 degrees (Poincare x, y).
PlanarResult run_planar(std::int64_t n_per_axis, double true_angle, const EveModel& eve, Rng& rng);

}  // namespace srf
