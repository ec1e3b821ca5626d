#pragma once

#include "srf/eve.hpp"
#include "srf/optimal.hpp"
#include "srf/parallel.hpp"
#include "srf/rep_space.hpp"

#include <cstdint>
#include <vector>

namespace srf {

enum class Preparation { orientation, tau, tau_tilde };
enum class Measurement { orientation, v, v_tilde };

struct TestLabel {
    Spin j;
    int m = 0;  // multiplicity basis index in [0, 2j]
    friend bool operator==(const TestLabel&, const TestLabel&) = default;
};

struct Round {
    Preparation prep = Preparation::orientation;
    Measurement meas = Measurement::orientation;
    Rotation h;               // Alice's random rotation (orientation rounds)
    TestLabel sent;           // test rounds
    TestLabel received;       // Bob's V / V~ outcome
    Rotation bob_estimate;    // Bob's orientation outcome, estimate of g h
    bool kept = false;
    bool mismatch = false;
};

/// Fourier partner |m~> = (1/sqrt d) sum_t exp(2 pi i t m / d) |t>.
CVector fourier_vector(int d, int m);

/// identity/(2j+1) on H_j (x) |m><m| (or |m~><m~|) on the (2j+1)-dim corner.
BlockDensity make_test_state(const ShapePtr& shape, Spin j, int m, bool tilde);

/// Block j by its weight, then the multiplicity outcome by the Born rule in
/// the computational (V) or Fourier (V~) basis.
TestLabel test_measurement(const BlockDensity& state, bool tilde, Rng& rng);
TestLabel test_measurement(const BlockVector& state, bool tilde, Rng& rng);

struct Bb84Params {
    int n_spins = 8;
    std::int64_t rounds = 400;
    EveModel eve;
    double threshold = 0.05;
    bool keep_transcript = false;
};

struct Bb84Result {
    std::int64_t rounds = 0;
    std::int64_t kept_orientation = 0;
    std::int64_t kept_test = 0;
    std::int64_t mismatches = 0;
    double mismatch_rate = 0.0;
    bool detection_defined = false;  // false when no test round survived sifting
    bool detection = false;
    double frame_error = 0.0;        // Bob's aggregate estimate of g vs truth
    double round_rms = 0.0;          // rms single-round error over kept orientation rounds
    double kept_fraction = 0.0;
    Rotation truth;
    std::vector<Round> transcript;
};

/// One protocol run. Each round draws from its own stream of `seed`.
Bb84Result run_bb84(const Bb84Params& params, std::uint64_t seed, Jobs jobs = {});
Bb84Result run_bb84_serial(const Bb84Params& params, std::uint64_t seed);

}  // namespace srf
