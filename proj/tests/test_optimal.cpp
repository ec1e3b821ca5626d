#include "srf/optimal.hpp"

#include "stats_util.hpp"

#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace srf;
using boost::math::quadrature::gauss_kronrod;

TEST_CASE("outcome density closed form at N = 3") {
    const OutcomeDensity q = outcome_density(*block_shape(3));
    for (double w = 0.0; w <= 2 * kPi; w += 0.01)
        CHECK(q(w) == doctest::Approx(std::pow(std::sin(w), 2) / kPi).epsilon(1e-12).scale(1e-12));
}

TEST_CASE("outcome density is normalized") {
    for (int n = 3; n <= 12; ++n) {
        const OutcomeDensity q = outcome_density(*block_shape(n));
        const double mass = gauss_kronrod<double, 61>::integrate([&](double w) { return q(w); }, 0.0, 2 * kPi, 15, 1e-12);
        CHECK(std::abs(mass - 1.0) < 1e-9);
        CHECK(std::abs(q.total_mass() - 1.0) < 1e-9);
        CHECK(q.grid_points() >= 4096);
        CHECK(q.cdf(0.0) == doctest::Approx(0.0));
        CHECK(q.cdf(2 * kPi) == doctest::Approx(1.0));
    }
}

TEST_CASE("density agrees with the block amplitude") {
    Rng rng = make_stream(41, 0);
    for (int n : {3, 6, 9, 16}) {
        const ShapePtr shape = block_shape(n);
        const OutcomeDensity q = outcome_density(*shape);
        const BlockVector a = build_A(shape);
        const BlockVector b = build_B(shape);
        for (int k = 0; k < 200; ++k) {
            const Rotation r = haar_sample(rng);
            const double w = class_angle(r);
            const double direct = std::norm(inner(b, apply_rotation(a, r))) * class_measure(w);
            CHECK(q(w) == doctest::Approx(direct).epsilon(1e-9).scale(1e-12));
        }
    }
}

TEST_CASE("density concentrates as N grows") {
    double previous = 1e9;
    for (int n : {4, 8, 16, 32}) {
        const OutcomeDensity q = outcome_density(*block_shape(n));
        const auto f = [&](double w) {
            const double a = std::min(w, 2 * kPi - w);
            return a * a * q(w);
        };
        const double ms = gauss_kronrod<double, 61>::integrate(f, 0.0, 2 * kPi, 15, 1e-12);
        CHECK(std::sqrt(ms) < previous);
        previous = std::sqrt(ms);
    }
}

TEST_CASE("CDF inversion") {
    const OutcomeDensity q = outcome_density(*block_shape(10));
    double last = -1.0;
    for (double w = 0.0; w <= 2 * kPi; w += 0.001) {
        const double c = q.cdf(w);
        CHECK(c >= last);
        last = c;
    }
    for (double u = 0.01; u < 1.0; u += 0.01) CHECK(q.cdf(q.inverse_cdf(u)) == doctest::Approx(u).epsilon(1e-8));
}

TEST_CASE("sampled error angles at N = 3 follow the folded closed form") {
    const OutcomeDensity q = outcome_density(*block_shape(3));
    Rng rng = make_stream(42, 0);
    const int samples = 100000;
    const int bins = 30;
    std::vector<double> counts(bins, 0.0);
    for (int k = 0; k < samples; ++k) {
        const double e = sample_outcome(Rotation::identity(), q, rng).error_angle;
        counts[std::min(bins - 1, int(e / kPi * bins))] += 1;
    }
    // SO(3) angle density 2 sin^2(t)/pi, CDF (t - sin t cos t)/pi.
    const auto cdf = [](double t) { return (t - std::sin(t) * std::cos(t)) / kPi; };
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double expected = samples * (cdf(kPi * (b + 1) / bins) - cdf(kPi * b / bins));
        chi2 += std::pow(counts[b] - expected, 2) / expected;
    }
    const boost::math::chi_squared dist(bins - 1);
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.001);
}

TEST_CASE("estimates are left covariant") {
    const OutcomeDensity q = outcome_density(*block_shape(8));
    Rng probe = make_stream(43, 0);
    const Rotation g = haar_sample(probe);
    for (int k = 0; k < 100; ++k) {
        Rng r1 = make_stream(44, std::uint64_t(k));
        Rng r2 = make_stream(44, std::uint64_t(k));
        const FrameEstimate with_g = sample_outcome(g, q, r1);
        const FrameEstimate plain = sample_outcome(Rotation::identity(), q, r2);
        CHECK(with_g.error_angle == plain.error_angle);
        CHECK(frame_error(with_g.estimate, compose(g, plain.estimate)) < 1e-7);
    }
}

TEST_CASE("a peaked density gives vanishing errors") {
    // Amplitudes spread over many blocks approximate a delta at the identity.
    std::vector<Amplitude> amps;
    const int top = 200;
    double norm = 0.0;
    for (int twice = 0; twice <= top; twice += 2) {
        const double v = std::sin(kPi * (twice / 2 + 1) / (top / 2 + 2));
        amps.push_back({Spin{twice}, v});
        norm += v * v;
    }
    for (Amplitude& a : amps) a.value /= std::sqrt(norm);
    const OutcomeDensity q(amps);
    Rng rng = make_stream(45, 0);
    std::vector<double> errors;
    for (int k = 0; k < 2000; ++k) errors.push_back(sample_outcome(Rotation::identity(), q, rng).error_angle);
    CHECK(srf_test::rms(errors) < 0.1);
}

TEST_CASE("run_optimal basics") {
    OptimalParams p;
    p.n_spins = 16;
    p.trials = 4000;
    p.randomized = true;
    const OptimalResult r = run_optimal(p, 5);
    CHECK(r.trials == 4000);
    CHECK(r.invariance_checked == 4000);
    CHECK(r.invariance_max_dev < 1e-10);
    CHECK(r.stats.rms > 0.0);
    CHECK(r.stats.p50 <= r.stats.p90);
    CHECK(r.stats.p90 <= r.stats.max);

    OptimalParams plain = p;
    plain.randomized = false;
    const OptimalResult r2 = run_optimal(plain, 5);
    CHECK(r2.stats.rms == r.stats.rms);
    CHECK(r2.invariance_checked == 0);

    const OptimalResult r3 = run_optimal(plain, 6);
    CHECK(std::abs(r3.stats.rms - r.stats.rms) < 4 * (r.stats.rms_stderr + r3.stats.rms_stderr));

    CHECK_THROWS_AS(run_optimal(OptimalParams{2, 10, true, {}, 16}, 1), DegenerateStateError);
}

TEST_CASE("measure-reprepare eavesdropping widens Bob's errors") {
    OptimalParams p;
    p.n_spins = 16;
    p.trials = 10000;
    const double clean = run_optimal(p, 7).stats.rms;
    p.eve = EveModel::of(EveKind::measure_reprepare);
    const double attacked = run_optimal(p, 7).stats.rms;
    CHECK(attacked / clean >= 1.3);
}

TEST_CASE("randomized outcome densities match pointwise") {
    Rng rng = make_stream(46, 0);
    for (int n = 3; n <= 8; ++n) {
        const ShapePtr shape = block_shape(n);
        const BlockVector a = build_A(shape);
        const BlockVector b = build_B(shape);
        double dev = 0.0;
        for (int s = 0; s < 20; ++s) {
            const SeedSequence seed = random_seed(a.support(), rng);
            const BlockVector as = randomize(a, seed);
            const BlockVector bs = randomize(b, seed);
            for (int k = 0; k < 10; ++k) {
                const Rotation x = haar_sample(rng);
                dev = std::max(dev, std::abs(std::norm(inner(bs, apply_rotation(as, x))) -
                                             std::norm(inner(b, apply_rotation(a, x)))));
            }
        }
        CHECK(dev <= 1e-10);
    }
}

TEST_CASE("eve's view without the seed") {
    const EveViewResult blind = eve_view_uniformity(3, 10000, 8);
    CHECK(blind.resultant_length <= 0.03);

    // Exhaustive 9-seed average at N = 4 is flat.
    const ShapePtr four = block_shape(4);
    const auto seeds = all_seeds(build_A(four).support());
    REQUIRE(seeds.size() == 9);
    Rng rng = make_stream(47, 0);
    double dev = 0.0;
    for (int k = 0; k < 100; ++k) dev = std::max(dev, std::abs(eve_outcome_density(four, seeds, haar_sample(rng), false) - 1.0));
    CHECK(dev <= 1e-10);

    // With the seed Eve is as good as Bob.
    const EveViewResult informed = eve_view_uniformity(8, 4000, 9, true);
    OptimalParams p;
    p.n_spins = 8;
    p.trials = 4000;
    const OptimalResult bob = run_optimal(p, 9);
    CHECK(std::abs(informed.rms_error - bob.stats.rms) < 0.1 * bob.stats.rms);
    CHECK(informed.resultant_length > 0.5);
}
