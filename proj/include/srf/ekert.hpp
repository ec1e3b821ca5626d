#pragma once

#include "srf/eve.hpp"
#include "srf/optimal.hpp"
#include "srf/parallel.hpp"
#include "srf/rep_space.hpp"

#include <array>
#include <cstdint>
#include <utility>

namespace srf {

/// How the two copies of H_j (x) C^{m_j} are correlated inside |Phi>.
enum class Pairing {
    invariant,  // S (x) S on the corner, S = d^j(pi); rotation-covariant pairing
    literal,    // |t u>_A |t u>_B
};

struct BipartiteBlock {
    Spin j;
    std::uint64_t mult = 0;
    double coeff = 0.0;  // A_j / sqrt((2j+1) m_j)
};

/// sum_j coeff_j sum_{alpha} |alpha>_A |pair(alpha)>_B over the support of A.
struct BipartiteBlockState {
    ShapePtr shape;
    std::vector<BipartiteBlock> blocks;
    Pairing pairing = Pairing::invariant;

    /// sum_j coeff_j^2 (2j+1) m_j
    double squared_norm() const;
};

BipartiteBlockState build_phi(const ShapePtr& shape, Pairing pairing = Pairing::invariant);

/// Reduced state of either party, trunc = m_j. Needs (2j+1) m_j <= 4096 per block.
BlockDensity reduced_state(const BipartiteBlockState& phi);

/// Dense |Phi> over (sum_j (2j+1) m_j)^2 coordinates, side index ordered by
/// block, then t, then multiplicity u. Only for N <= 6.
CVector dense_phi(const BipartiteBlockState& phi);

/// One side's POVM vector U_h|B> in the dense side coordinates of dense_phi.
CVector dense_povm_vector(const BipartiteBlockState& phi, const Rotation& h);

/// <Phi| M(h_A) (x) U_g^dagger M(h_B) U_g |Phi> by explicit contraction.
double joint_density_direct(const BipartiteBlockState& phi, const Rotation& g, const Rotation& h_a,
                            const Rotation& h_b);

/// <A| M(h_A h_B^-1 g) |A> = (sum_j A_j chi_j)^2.
double joint_density_reduced(const std::vector<Amplitude>& amplitudes, const Rotation& g, const Rotation& h_a,
                             const Rotation& h_b);

/// |direct - reduced| for N <= 4.
double verify_joint_density(int n_spins, const Rotation& g, const Rotation& h_a, const Rotation& h_b);

struct JointOutcome {
    Rotation h_a;
    Rotation h_b;
};

/// h_A Haar; k from the class-angle density; h_B = g k^-1 h_A so h_A h_B^-1 g = k.
JointOutcome joint_orientation_sample(const Rotation& g, const OutcomeDensity& density, Rng& rng);

/// Bob's frame estimate from his outcome and Alice's announced one.
inline Rotation infer_frame(const JointOutcome& o) { return compose(o.h_b, o.h_a.inverse()); }

struct EkertFrameResult {
    int n_spins = 0;
    std::int64_t trials = 0;
    ErrorStats stats;
    double h_a_resultant = 0.0;  // mean resultant length of h_A z-axes
};

EkertFrameResult run_ekert_frames(int n_spins, std::int64_t trials, std::uint64_t seed, Jobs jobs = {});

struct ChshResult {
    double s_value = 0.0;
    std::array<double, 4> correlations{};   // E(a,b), E(a,b'), E(a',b), E(a',b')
    std::array<double, 2> alice_means{};    // per Alice setting
    std::array<double, 2> bob_means{};      // per Bob setting
    std::int64_t attempts = 0;
    std::int64_t in_block = 0;              // attempts where both found j = the test block
    std::int64_t postselected = 0;
    Spin block;
    std::uint64_t mult = 0;
    double postselection_rate = 0.0;        // postselected / in_block
    double predicted_rate = 0.0;            // 2 / m_j
};

/// CHSH on the multiplicity pair of the supported block with the largest m_j.
/// Runs until `rounds` attempts survive post-selection.
ChshResult chsh_test(const ShapePtr& shape, std::int64_t rounds, const EveModel& eve, std::uint64_t seed);

}  // namespace srf
