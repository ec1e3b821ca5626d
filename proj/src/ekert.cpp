#include "srf/ekert.hpp"

#include <cmath>
#include <stdexcept>

namespace srf {

double BipartiteBlockState::squared_norm() const {
    double s = 0.0;
    for (const BipartiteBlock& b : blocks) s += b.coeff * b.coeff * b.j.dim() * double(b.mult);
    return s;
}

BipartiteBlockState build_phi(const ShapePtr& shape, Pairing pairing) {
    BipartiteBlockState phi{shape, {}, pairing};
    for (const Amplitude& a : optimal_amplitudes(*shape)) {
        const Block& b = shape->block(a.j);
        phi.blocks.push_back({a.j, b.mult, a.value / std::sqrt(double(b.dim) * double(b.mult))});
    }
    return phi;
}

BlockDensity reduced_state(const BipartiteBlockState& phi) {
    BlockDensity rho{phi.shape, {}, true};
    for (const BipartiteBlock& b : phi.blocks) {
        const std::uint64_t size = std::uint64_t(b.j.dim()) * b.mult;
        if (size > 4096) throw std::length_error("reduced_state: block too large to materialize");
        const int n = int(size);
        // Tracing out the partner of a maximally correlated block.
        const double weight = b.coeff * b.coeff * double(n);
        rho.blocks.push_back({b.j, int(b.mult), CMatrix::Identity(n, n) * (weight / n)});
    }
    return rho;
}

namespace {

int side_dimension(const BipartiteBlockState& phi) {
    int n = 0;
    for (const BipartiteBlock& b : phi.blocks) n += b.j.dim() * int(b.mult);
    return n;
}

void check_small(const BipartiteBlockState& phi) {
    if (phi.shape->n_spins > 6) throw std::length_error("dense bipartite state limited to N <= 6");
}

}  // namespace

CVector dense_phi(const BipartiteBlockState& phi) {
    check_small(phi);
    const int side = side_dimension(phi);
    CVector out = CVector::Zero(Eigen::Index(side) * side);
    int offset = 0;
    for (const BipartiteBlock& b : phi.blocks) {
        const int d = b.j.dim();
        const int m = int(b.mult);
        const Eigen::MatrixXd s = wigner_small_d(b.j, kPi);
        const auto put = [&](int ta, int ua, int tb, int ub, double w) {
            out(Eigen::Index(offset + ta * m + ua) * side + offset + tb * m + ub) += b.coeff * w;
        };
        for (int t = 0; t < d; ++t)
            for (int u = 0; u < m; ++u) {
                if (phi.pairing == Pairing::literal) {
                    put(t, u, t, u, 1.0);
                    continue;
                }
                for (int tp = 0; tp < d; ++tp) {
                    if (s(t, tp) == 0.0) continue;
                    if (u < d) {
                        for (int up = 0; up < d; ++up)
                            if (s(u, up) != 0.0) put(t, u, tp, up, s(t, tp) * s(u, up));
                    } else {
                        put(t, u, tp, u, s(t, tp));
                    }
                }
            }
        offset += d * m;
    }
    return out;
}

CVector dense_povm_vector(const BipartiteBlockState& phi, const Rotation& h) {
    check_small(phi);
    CVector out = CVector::Zero(side_dimension(phi));
    int offset = 0;
    for (const BipartiteBlock& b : phi.blocks) {
        const int d = b.j.dim();
        const int m = int(b.mult);
        const CMatrix dm = wigner_D(b.j, h) * std::sqrt(double(d));
        for (int t = 0; t < d; ++t)
            for (int u = 0; u < d && u < m; ++u) out(offset + t * m + u) = dm(t, u);
        offset += d * m;
    }
    return out;
}

double joint_density_direct(const BipartiteBlockState& phi, const Rotation& g, const Rotation& h_a,
                            const Rotation& h_b) {
    const int side = side_dimension(phi);
    CMatrix u_g = CMatrix::Zero(side, side);
    int offset = 0;
    for (const BipartiteBlock& b : phi.blocks) {
        const int d = b.j.dim();
        const int m = int(b.mult);
        const CMatrix dg = wigner_D(b.j, g);
        for (int t = 0; t < d; ++t)
            for (int s = 0; s < d; ++s)
                for (int u = 0; u < m; ++u) u_g(offset + t * m + u, offset + s * m + u) = dg(t, s);
        offset += d * m;
    }
    const CVector va = dense_povm_vector(phi, h_a);
    const CVector vb = dense_povm_vector(phi, h_b);
    const CMatrix m_a = va * va.adjoint();
    const CMatrix m_b = u_g.adjoint() * (vb * vb.adjoint()) * u_g;

    CMatrix op(Eigen::Index(side) * side, Eigen::Index(side) * side);
    for (int i = 0; i < side; ++i)
        for (int k = 0; k < side; ++k) op.block(Eigen::Index(i) * side, Eigen::Index(k) * side, side, side) = m_a(i, k) * m_b;
    const CVector f = dense_phi(phi);
    return (f.adjoint() * op * f)(0, 0).real();
}

double joint_density_reduced(const std::vector<Amplitude>& amplitudes, const Rotation& g, const Rotation& h_a,
                             const Rotation& h_b) {
    const double omega = class_angle(compose(compose(h_a, h_b.inverse()), g));
    double amp = 0.0;
    for (const Amplitude& a : amplitudes) amp += a.value * character(a.j, omega);
    return amp * amp;
}

double verify_joint_density(int n_spins, const Rotation& g, const Rotation& h_a, const Rotation& h_b) {
    if (n_spins > 4) throw std::length_error("verify_joint_density limited to N <= 4");
    const ShapePtr shape = block_shape(n_spins);
    const BipartiteBlockState phi = build_phi(shape);
    return std::abs(joint_density_direct(phi, g, h_a, h_b) -
                    joint_density_reduced(optimal_amplitudes(*shape), g, h_a, h_b));
}

JointOutcome joint_orientation_sample(const Rotation& g, const OutcomeDensity& density, Rng& rng) {
    JointOutcome o;
    o.h_a = haar_sample(rng);
    const Rotation k = sample_relative(density, rng);
    o.h_b = compose(compose(g, k.inverse()), o.h_a);
    return o;
}

namespace {

struct EkertTrial {
    double error = 0.0;
    Vec3 h_a_axis = Vec3::Zero();
};

}  // namespace

EkertFrameResult run_ekert_frames(int n_spins, std::int64_t trials, std::uint64_t seed, Jobs jobs) {
    if (n_spins < 3) throw DegenerateStateError("ekert protocol needs N >= 3");
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    const OutcomeDensity density(optimal_amplitudes(*block_shape(n_spins)));
    const auto kernel = [&](std::int64_t, Rng& rng) {
        const Rotation g = haar_sample(rng);
        const JointOutcome o = joint_orientation_sample(g, density, rng);
        return EkertTrial{frame_error(infer_frame(o), g), o.h_a.rotate(Vec3::UnitZ())};
    };
    const std::vector<EkertTrial> out = map_trials<EkertTrial>(trials, seed, jobs, kernel);
    EkertFrameResult r;
    r.n_spins = n_spins;
    r.trials = trials;
    std::vector<double> errors;
    Vec3 sum = Vec3::Zero();
    for (const EkertTrial& t : out) {
        errors.push_back(t.error);
        sum += t.h_a_axis;
    }
    r.stats = error_stats(std::move(errors));
    r.h_a_resultant = (sum / double(trials)).norm();
    return r;
}

ChshResult chsh_test(const ShapePtr& shape, std::int64_t rounds, const EveModel& eve, std::uint64_t seed) {
    const std::vector<Amplitude> amps = optimal_amplitudes(*shape);
    const Amplitude* chosen = nullptr;
    for (const Amplitude& a : amps)
        if (!chosen || shape->block(a.j).mult > shape->block(chosen->j).mult) chosen = &a;
    const std::uint64_t mult = shape->block(chosen->j).mult;
    if (mult < 2) throw std::invalid_argument("chsh_test needs a supported block with multiplicity >= 2");

    ChshResult r;
    r.block = chosen->j;
    r.mult = mult;
    r.predicted_rate = 2.0 / double(mult);

    // Settings as analyzer angles; observable cos(2a) Z + sin(2a) X.
    const std::array<double, 2> alice{0.0, kPi / 4};
    const std::array<double, 2> bob{kPi / 8, 3 * kPi / 8};
    std::array<std::int64_t, 4> same{};
    std::array<std::int64_t, 4> count{};
    std::array<double, 2> a_sum{};
    std::array<std::int64_t, 2> a_cnt{};
    std::array<double, 2> b_sum{};
    std::array<std::int64_t, 2> b_cnt{};

    Rng rng = make_stream(seed, 0);
    std::vector<double> block_weights;
    for (const Amplitude& a : amps) block_weights.push_back(a.value * a.value);
    std::discrete_distribution<std::size_t> pick_block(block_weights.begin(), block_weights.end());
    std::uniform_int_distribution<std::uint64_t> pick_mult(0, mult - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    const std::int64_t max_attempts = rounds * std::int64_t(std::max<std::uint64_t>(mult, 2)) * 1000;

    while (r.postselected < rounds && r.attempts < max_attempts) {
        ++r.attempts;
        // Both sides measure j and always agree.
        if (amps[pick_block(rng)].j != chosen->j) continue;
        ++r.in_block;

        // Multiplicity pair in Bob's paired basis: sum_n |n n> / sqrt(m).
        Eigen::Vector4d psi;
        if (eve.kind == EveKind::multiplicity_basis) {
            const std::uint64_t n = pick_mult(rng);
            if (n > 1) continue;
            psi = n == 0 ? Eigen::Vector4d(1, 0, 0, 0) : Eigen::Vector4d(0, 0, 0, 1);
        } else {
            if (!bernoulli(rng, 2.0 / double(mult))) continue;
            psi = Eigen::Vector4d(1, 0, 0, 1) / std::sqrt(2.0);
        }
        ++r.postselected;

        const int ia = coin(rng);
        const int ib = coin(rng);
        const auto basis = [](double angle, int outcome) {
            return outcome == 0 ? Eigen::Vector2d(std::cos(angle), std::sin(angle))
                                : Eigen::Vector2d(-std::sin(angle), std::cos(angle));
        };
        std::array<double, 4> probs{};
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                const Eigen::Vector2d ea = basis(alice[ia], x);
                const Eigen::Vector2d eb = basis(bob[ib], y);
                Eigen::Vector4d e;
                e << ea(0) * eb(0), ea(0) * eb(1), ea(1) * eb(0), ea(1) * eb(1);
                const double amp = e.dot(psi);
                probs[x * 2 + y] = amp * amp;
            }
        std::discrete_distribution<int> outcome(probs.begin(), probs.end());
        const int xy = outcome(rng);
        const int va = (xy / 2) == 0 ? 1 : -1;
        const int vb = (xy % 2) == 0 ? 1 : -1;
        const int idx = ia * 2 + ib;
        ++count[idx];
        if (va == vb) ++same[idx];
        a_sum[ia] += va;
        ++a_cnt[ia];
        b_sum[ib] += vb;
        ++b_cnt[ib];
    }

    for (int k = 0; k < 4; ++k)
        r.correlations[k] = count[k] ? (2.0 * double(same[k]) - double(count[k])) / double(count[k]) : 0.0;
    r.s_value = r.correlations[0] - r.correlations[1] + r.correlations[2] + r.correlations[3];
    for (int k = 0; k < 2; ++k) {
        r.alice_means[k] = a_cnt[k] ? a_sum[k] / double(a_cnt[k]) : 0.0;
        r.bob_means[k] = b_cnt[k] ? b_sum[k] / double(b_cnt[k]) : 0.0;
    }
    r.postselection_rate = r.in_block ? double(r.postselected) / double(r.in_block) : 0.0;
    return r;
}

}  // namespace srf
