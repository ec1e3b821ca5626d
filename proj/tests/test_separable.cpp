#include "srf/parallel.hpp"
#include "srf/separable.hpp"

#include <doctest.h>

#include <cmath>

using namespace srf;

TEST_CASE("qubit outcomes follow cos^2 of the half angle") {
    Rng rng = make_stream(31, 0);
    for (int k = 0; k < 1000; ++k) {
        CHECK(qubit_outcome(Vec3::UnitZ(), Vec3::UnitZ(), rng) == Outcome::up);
        CHECK(qubit_outcome(Vec3::UnitZ(), -Vec3::UnitZ(), rng) == Outcome::down);
    }
    int up = 0;
    for (int k = 0; k < 10000; ++k) up += qubit_outcome(Vec3::UnitZ(), Vec3::UnitX(), rng) == Outcome::up;
    CHECK(std::abs(up / 10000.0 - 0.5) < 0.01);
    const Vec3 tilted(std::sin(1.0), 0, std::cos(1.0));
    up = 0;
    for (int k = 0; k < 100000; ++k) up += qubit_outcome(Vec3::UnitZ(), tilted, rng) == Outcome::up;
    CHECK(std::abs(up / 100000.0 - std::pow(std::cos(0.5), 2)) < 0.006);
}

TEST_CASE("angle estimates from tallies") {
    MeasurementTally all_match;
    all_match.up_bit0 = 60;
    all_match.down_bit1 = 40;
    const AngleEstimate e0 = estimate_angle(all_match);
    CHECK(e0.p_bar == 1.0);
    CHECK(e0.theta_hat == 0.0);
    CHECK(e0.delta_theta == doctest::Approx(0.1));

    MeasurementTally half;
    half.up_bit0 = 2500;
    half.down_bit0 = 2500;
    half.up_bit1 = 2500;
    half.down_bit1 = 2500;
    const AngleEstimate e1 = estimate_angle(half);
    CHECK(e1.theta_hat == doctest::Approx(kPi / 2));
    CHECK(e1.delta_theta == doctest::Approx(0.01));
    CHECK(e1.delta_theta_large_n == doctest::Approx(0.01));

    // p_bar = cos^2(pi/8) up to integer rounding of a large tally.
    const double p = std::pow(std::cos(kPi / 8), 2);
    MeasurementTally quarter;
    quarter.up_bit0 = std::int64_t(std::llround(p * 1e12));
    quarter.down_bit0 = std::int64_t(1e12) - quarter.up_bit0;
    CHECK(estimate_angle(quarter).theta_hat == doctest::Approx(kPi / 4).epsilon(1e-5));

    CHECK_THROWS_AS(estimate_angle(MeasurementTally{}), std::invalid_argument);
}

TEST_CASE("tally bookkeeping") {
    MeasurementTally t;
    t.record(Outcome::up, 0);
    t.record(Outcome::down, 1);
    t.record(Outcome::up, 1);
    CHECK(t.total() == 3);
    CHECK(t.matches() == 2);
}

TEST_CASE("per-axis estimates concentrate on the truth") {
    const std::int64_t n = 4096;
    int within = 0;
    for (int k = 0; k < 200; ++k) {
        Rng rng = make_stream(32, std::uint64_t(k));
        const double theta = kPi * uniform01(rng);
        const AngleEstimate e = run_single_axis(n, theta, EveModel::none(), rng);
        within += std::abs(e.p_bar - std::pow(std::cos(theta / 2), 2)) <= 4 / std::sqrt(double(n));
    }
    CHECK(within >= 198);
}

TEST_CASE("direction reconstruction without eavesdropper") {
    const SeparableParams params{10000, 5.0};
    int ok = 0;
    int alarms = 0;
    for (int k = 0; k < 100; ++k) {
        Rng rng = make_stream(33, std::uint64_t(k));
        const Rotation truth = k % 2 ? haar_sample(rng) : Rotation::identity();
        const DirectionResult r = run_separable(params, truth, EveModel::none(), rng);
        CHECK(r.direction.norm() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK((r.truth - truth.rotate(Vec3::UnitZ())).norm() < 1e-12);
        double exact = 0.0;
        for (double a : r.true_angles) exact += std::pow(std::cos(a), 2);
        CHECK(exact == doctest::Approx(1.0).epsilon(1e-12));
        ok += r.error_angle <= 5 * 3 / std::sqrt(10000.0);
        alarms += r.alarm;
    }
    CHECK(ok >= 95);
    CHECK(alarms <= 5);
}

TEST_CASE("intercept-resend raises the alarm") {
    const SeparableParams params{10000, 5.0};
    int alarms = 0;
    for (int k = 0; k < 100; ++k) {
        Rng rng = make_stream(34, std::uint64_t(k));
        const DirectionResult r = run_separable(params, haar_sample(rng), EveModel::of(EveKind::intercept), rng);
        alarms += r.alarm;
        CHECK(r.cos2_sum < 0.3);
    }
    CHECK(alarms >= 99);
}

TEST_CASE("intercept Bloch shrink factor is one third") {
    // Single-qubit Monte Carlo: E[outcome along the preparation] = 1/3.
    Rng rng = make_stream(35, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const Vec3 axis = uniform_direction(rng);
        const Vec3 resent = qubit_outcome(Vec3::UnitZ(), axis, rng) == Outcome::up ? axis : Vec3(-axis);
        sum += qubit_outcome(resent, Vec3::UnitZ(), rng) == Outcome::up ? 1.0 : -1.0;
    }
    CHECK(std::abs(sum / n - 1.0 / 3.0) < 0.01);
}

TEST_CASE("planar variant") {
    Rng rng = make_stream(36, 0);
    const std::int64_t n = 10000;
    const PlanarResult zero = run_planar(n, 0.0, EveModel::none(), rng);
    CHECK(zero.direction_error <= 5 * std::sqrt(2.0 / n));
    CHECK(zero.angle_hat >= 0.0);
    CHECK(zero.angle_hat < kPi);

    // Unbiased at pi/4.
    const int trials = 400;
    std::vector<double> est;
    for (int k = 0; k < trials; ++k) {
        Rng r = make_stream(37, std::uint64_t(k));
        est.push_back(run_planar(4096, kPi / 4, EveModel::none(), r).angle_hat);
    }
    double mean = 0.0, var = 0.0;
    for (double e : est) mean += e;
    mean /= trials;
    for (double e : est) var += (e - mean) * (e - mean);
    const double stderr_mean = std::sqrt(var / (trials - 1) / trials);
    CHECK(std::abs(mean - kPi / 4) < 3 * stderr_mean);
}
