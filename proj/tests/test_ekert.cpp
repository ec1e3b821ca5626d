#include "srf/ekert.hpp"

#include "stats_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace srf;

TEST_CASE("bipartite state normalization and block correlation") {
    for (int n = 3; n <= 6; ++n) {
        const ShapePtr shape = block_shape(n);
        const BipartiteBlockState phi = build_phi(shape);
        CHECK(phi.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
        const CVector dense = dense_phi(phi);
        CHECK(dense.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));

        // Amplitudes only connect equal blocks on the two sides.
        int side = 0;
        std::vector<int> block_of;
        for (std::size_t b = 0; b < phi.blocks.size(); ++b) {
            const int size = phi.blocks[b].j.dim() * int(phi.blocks[b].mult);
            for (int k = 0; k < size; ++k) block_of.push_back(int(b));
            side += size;
        }
        for (int x = 0; x < side; ++x)
            for (int y = 0; y < side; ++y)
                if (block_of[x] != block_of[y]) CHECK(dense(Eigen::Index(x) * side + y) == Complex(0, 0));

        // Partial trace over B matches the rotation-invariant reduced state.
        CMatrix m(side, side);
        for (int x = 0; x < side; ++x)
            for (int y = 0; y < side; ++y) m(x, y) = dense(Eigen::Index(x) * side + y);
        const CMatrix rho_a = m * m.adjoint();
        const BlockDensity reduced = reduced_state(phi);
        CHECK(reduced.trace() == doctest::Approx(1.0).epsilon(1e-12));
        int offset = 0;
        for (const DensityBlock& b : reduced.blocks) {
            const int size = int(b.rho.rows());
            CHECK((rho_a.block(offset, offset, size, size) - b.rho).cwiseAbs().maxCoeff() < 1e-12);
            offset += size;
        }
    }
    CHECK_THROWS_AS(build_phi(block_shape(2)), DegenerateStateError);
}

TEST_CASE("joint outcome density, direct contraction against the reduction") {
    Rng rng = make_stream(61, 0);
    for (int n : {3, 4}) {
        double dev = 0.0;
        for (int k = 0; k < 50; ++k)
            dev = std::max(dev, verify_joint_density(n, haar_sample(rng), haar_sample(rng), haar_sample(rng)));
        CHECK(dev <= 1e-9);
    }
    // Equal outcomes and trivial frame at N = 4: (sum_j A_j (2j+1))^2 = 9.
    const ShapePtr four = block_shape(4);
    const Rotation h = haar_sample(rng);
    CHECK(joint_density_direct(build_phi(four), Rotation::identity(), h, h) == doctest::Approx(9.0).epsilon(1e-10));
    CHECK(joint_density_reduced(optimal_amplitudes(*four), Rotation::identity(), h, h) == doctest::Approx(9.0));
    CHECK_THROWS(verify_joint_density(5, h, h, h));
}

TEST_CASE("joint density depends only on h_A h_B^-1 g") {
    Rng rng = make_stream(62, 0);
    for (int n : {3, 4}) {
        const BipartiteBlockState phi = build_phi(block_shape(n));
        for (int k = 0; k < 20; ++k) {
            const Rotation g = haar_sample(rng);
            const Rotation ha = haar_sample(rng);
            const Rotation hb = haar_sample(rng);
            const Rotation r = haar_sample(rng);
            const double base = joint_density_direct(phi, g, ha, hb);
            CHECK(joint_density_direct(phi, g, compose(ha, r), compose(hb, r)) == doctest::Approx(base).epsilon(1e-10).scale(1e-10));
        }
    }
}

TEST_CASE("the literal pairing breaks the reduction") {
    Rng rng = make_stream(63, 0);
    const ShapePtr shape = block_shape(3);
    const BipartiteBlockState literal = build_phi(shape, Pairing::literal);
    CHECK(dense_phi(literal).squaredNorm() == doctest::Approx(1.0));
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Rotation g = haar_sample(rng);
        const Rotation ha = haar_sample(rng);
        const Rotation hb = haar_sample(rng);
        worst = std::max(worst, std::abs(joint_density_direct(literal, g, ha, hb) -
                                         joint_density_reduced(optimal_amplitudes(*shape), g, ha, hb)));
    }
    CHECK(worst > 1e-2);
}

TEST_CASE("joint sampler") {
    const int n = 16;
    const OutcomeDensity density = outcome_density(*block_shape(n));
    Rng rng = make_stream(64, 0);
    const Rotation g = haar_sample(rng);
    Vec3 axis_sum = Vec3::Zero();
    std::vector<double> joint_errors;
    const int draws = 10000;
    for (int k = 0; k < draws; ++k) {
        const JointOutcome o = joint_orientation_sample(g, density, rng);
        axis_sum += o.h_a.rotate(Vec3::UnitZ());
        joint_errors.push_back(frame_error(infer_frame(o), g));
    }
    CHECK((axis_sum / draws).norm() <= 0.03);

    std::vector<double> single;
    for (int k = 0; k < draws; ++k) single.push_back(sample_outcome(g, density, rng).error_angle);
    CHECK(srf_test::ks_two_sample_p(joint_errors, single) > 0.001);
    CHECK(srf_test::rms(joint_errors) == doctest::Approx(srf_test::rms(single)).epsilon(0.05));

    // The sampled pair reproduces the drawn relative rotation exactly.
    Rng a = make_stream(65, 0);
    const JointOutcome o = joint_orientation_sample(g, density, a);
    const Rotation k = compose(compose(o.h_a, o.h_b.inverse()), g);
    Rng b = make_stream(65, 0);
    (void)haar_sample(b);
    const Rotation k_ref = sample_relative(density, b);
    CHECK(frame_error(k, k_ref) < 1e-7);
}

TEST_CASE("frame recovery improves with N") {
    const EkertFrameResult small = run_ekert_frames(8, 2000, 3);
    const EkertFrameResult large = run_ekert_frames(32, 2000, 3);
    CHECK(large.stats.rms < small.stats.rms / 2.5);
    CHECK(small.h_a_resultant < 0.06);
}

TEST_CASE("CHSH on the multiplicity pair") {
    const ShapePtr shape = block_shape(6);
    const ChshResult clean = chsh_test(shape, 100000, EveModel::none(), 7);
    CHECK(clean.block == Spin{2});
    CHECK(clean.mult == 9u);
    CHECK(clean.postselected == 100000);
    CHECK(std::abs(clean.s_value - 2 * std::sqrt(2.0)) <= 0.05);
    for (double m : clean.alice_means) CHECK(std::abs(m) <= 0.02);
    for (double m : clean.bob_means) CHECK(std::abs(m) <= 0.02);
    const double p = clean.predicted_rate;
    CHECK(p == doctest::Approx(2.0 / 9.0));
    const double se = std::sqrt(p * (1 - p) / double(clean.in_block));
    CHECK(std::abs(clean.postselection_rate - p) <= 3 * se);

    const ChshResult attacked = chsh_test(shape, 100000, EveModel::of(EveKind::multiplicity_basis), 8);
    CHECK(attacked.s_value <= 2.05);

    CHECK_THROWS(chsh_test(block_shape(1), 10, EveModel::none(), 1));
}
