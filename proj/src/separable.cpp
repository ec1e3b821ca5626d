#include "srf/separable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srf {

void MeasurementTally::record(Outcome o, int bit) {
    if (bit == 0)
        (o == Outcome::up ? up_bit0 : down_bit0) += 1;
    else
        (o == Outcome::up ? up_bit1 : down_bit1) += 1;
}

AngleEstimate estimate_angle(const MeasurementTally& tally) {
    const std::int64_t n = tally.total();
    if (n < 1) throw std::invalid_argument("estimate_angle: empty tally");
    AngleEstimate e;
    e.p_bar = double(tally.matches()) / double(n);
    e.theta_hat = 2.0 * std::acos(std::sqrt(std::clamp(e.p_bar, 0.0, 1.0)));
    e.delta_theta_large_n = 1.0 / std::sqrt(double(n));
    const double slope = 0.5 * std::sin(e.theta_hat);  // |dp/dtheta| at theta_hat
    if (slope <= 0.0 || e.p_bar <= 0.0 || e.p_bar >= 1.0)
        e.delta_theta = e.delta_theta_large_n;
    else
        e.delta_theta = std::sqrt(e.p_bar * (1.0 - e.p_bar)) / (std::sqrt(double(n)) * slope);
    return e;
}

namespace {

// Alice's spin for the secret bit, possibly intercepted and resent by Eve.
Vec3 transmit(const Vec3& alice_axis, int bit, const EveModel& eve, Rng& rng) {
    const Vec3 prep = bit == 0 ? alice_axis : Vec3(-alice_axis);
    if (eve.kind != EveKind::intercept) return prep;
    const Vec3 axis = eve.random_axis ? uniform_direction(rng) : Vec3(eve.fixed_axis.normalized());
    return qubit_outcome(prep, axis, rng) == Outcome::up ? axis : Vec3(-axis);
}

MeasurementTally measure_axis(std::int64_t n, const Vec3& alice_axis, const Vec3& bob_axis, const EveModel& eve,
                              Rng& rng) {
    std::uniform_int_distribution<int> coin(0, 1);
    MeasurementTally tally;
    for (std::int64_t k = 0; k < n; ++k) {
        const int bit = coin(rng);
        tally.record(qubit_outcome(transmit(alice_axis, bit, eve, rng), bob_axis, rng), bit);
    }
    return tally;
}

double signed_cosine(const AngleEstimate& e) { return 2.0 * e.p_bar - 1.0; }

}  // namespace

AngleEstimate run_single_axis(std::int64_t n, double theta, const EveModel& eve, Rng& rng) {
    const Vec3 alice(std::sin(theta), 0.0, std::cos(theta));
    return estimate_angle(measure_axis(n, alice, Vec3::UnitZ(), eve, rng));
}

DirectionResult run_separable(const SeparableParams& params, const Rotation& true_rotation, const EveModel& eve,
                              Rng& rng) {
    if (params.n_per_axis < 1) throw std::invalid_argument("run_separable: n_per_axis must be positive");
    const std::int64_t n = params.n_per_axis;
    const Vec3 alice = true_rotation.rotate(Vec3::UnitZ());
    const std::array<Vec3, 3> bob_axes{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};

    // Bob cycles x, y, z spin by spin.
    std::uniform_int_distribution<int> coin(0, 1);
    std::array<MeasurementTally, 3> tallies{};
    for (std::int64_t k = 0; k < 3 * n; ++k) {
        const int axis = int(k % 3);
        const int bit = coin(rng);
        tallies[axis].record(qubit_outcome(transmit(alice, bit, eve, rng), bob_axes[axis], rng), bit);
    }

    DirectionResult r;
    r.truth = alice;
    Vec3 cosines;
    double bias = 0.0;
    double variance = 0.0;
    for (int i = 0; i < 3; ++i) {
        r.axes[i] = estimate_angle(tallies[i]);
        r.true_angles[i] = std::acos(std::clamp(alice.dot(bob_axes[i]), -1.0, 1.0));
        r.overall_error += std::abs(r.axes[i].theta_hat - r.true_angles[i]);
        const double c = signed_cosine(r.axes[i]);
        cosines(i) = c;
        const double v = (1.0 - c * c) / double(n);
        bias += v;
        variance += 4.0 * c * c * v + 2.0 * v * v;
    }

    r.cos2_sum = cosines.squaredNorm();
    const double sigma = variance > 0.0 ? std::sqrt(variance) : 1.0 / double(n);
    r.alarm_statistic = std::abs(r.cos2_sum - 1.0 - bias) / sigma;
    r.alarm = r.alarm_statistic > params.k_sigma;

    const double norm = cosines.norm();
    if (norm < 1e-9) {
        r.degenerate = true;
        r.direction = Vec3::UnitZ();
    } else {
        r.direction = cosines / norm;
    }
    r.error_angle = std::acos(std::clamp(r.direction.dot(alice), -1.0, 1.0));
    return r;
}

PlanarResult run_planar(std::int64_t n_per_axis, double true_angle, const EveModel& eve, Rng& rng) {
    if (n_per_axis < 1) throw std::invalid_argument("run_planar: n_per_axis must be positive");
    // Linear polarization at angle phi sits at Poincare-sphere angle 2 phi.
    const Vec3 bloch(std::cos(2.0 * true_angle), std::sin(2.0 * true_angle), 0.0);
    const std::array<Vec3, 2> analyzers{Vec3::UnitX(), Vec3::UnitY()};

    std::uniform_int_distribution<int> coin(0, 1);
    std::array<MeasurementTally, 2> tallies{};
    for (std::int64_t k = 0; k < 2 * n_per_axis; ++k) {
        const int axis = int(k % 2);
        const int bit = coin(rng);
        tallies[axis].record(qubit_outcome(transmit(bloch, bit, eve, rng), analyzers[axis], rng), bit);
    }

    PlanarResult r;
    r.truth = std::fmod(std::fmod(true_angle, kPi) + kPi, kPi);
    double c[2];
    for (int i = 0; i < 2; ++i) {
        r.axes[i] = estimate_angle(tallies[i]);
        c[i] = signed_cosine(r.axes[i]);
        const double true_theta = std::acos(std::clamp(bloch.dot(analyzers[i]), -1.0, 1.0));
        r.overall_error += std::abs(r.axes[i].theta_hat - true_theta);
    }
    double angle = 0.5 * std::atan2(c[1], c[0]);
    if (angle < 0.0) angle += kPi;
    r.angle_hat = angle;
    const double diff = std::fmod(std::abs(r.angle_hat - r.truth), kPi);
    r.direction_error = std::min(diff, kPi - diff);
    return r;
}

}  // namespace srf
