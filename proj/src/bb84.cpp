#include "srf/bb84.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

namespace srf {

CVector fourier_vector(int d, int m) {
    CVector f(d);
    for (int t = 0; t < d; ++t) f(t) = std::polar(1.0 / std::sqrt(double(d)), 2.0 * kPi * t * m / d);
    return f;
}

BlockDensity make_test_state(const ShapePtr& shape, Spin j, int m, bool tilde) {
    const auto i = shape->index_of(j);
    if (!i || !shape->has_corner(*i)) throw std::invalid_argument("make_test_state: j has no corner in this shape");
    const int d = j.dim();
    if (m < 0 || m >= d) throw std::invalid_argument("make_test_state: m out of range");
    CVector b = CVector::Zero(d);
    if (tilde)
        b = fourier_vector(d, m);
    else
        b(m) = 1.0;
    const CMatrix mult = b * b.adjoint();
    CMatrix rho = CMatrix::Zero(d * d, d * d);
    for (int t = 0; t < d; ++t) rho.block(t * d, t * d, d, d) = mult / double(d);
    return BlockDensity{shape, {{j, d, rho}}, true};
}

namespace {

CMatrix multiplicity_marginal(const DensityBlock& b) {
    const int d = b.j.dim();
    const int s = b.trunc;
    CMatrix out = CMatrix::Zero(s, s);
    for (int t = 0; t < d; ++t) out += b.rho.block(t * s, t * s, s, s);
    return out;
}

template <typename Weights>
std::size_t sample_index(const Weights& w, Rng& rng) {
    double total = 0.0;
    for (double x : w) total += x;
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (u < w[i]) return i;
        u -= w[i];
    }
    for (std::size_t i = w.size(); i-- > 0;)
        if (w[i] > 0.0) return i;
    return 0;
}

}  // namespace

TestLabel test_measurement(const BlockDensity& state, bool tilde, Rng& rng) {
    std::vector<double> weights;
    for (const DensityBlock& b : state.blocks) weights.push_back(std::max(0.0, b.rho.trace().real()));
    const DensityBlock& block = state.blocks[sample_index(weights, rng)];
    const CMatrix marginal = multiplicity_marginal(block);
    std::vector<double> probs(static_cast<std::size_t>(block.trunc));
    for (int u = 0; u < block.trunc; ++u) {
        CVector b = CVector::Zero(block.trunc);
        if (tilde)
            b = fourier_vector(block.trunc, u);
        else
            b(u) = 1.0;
        probs[u] = std::max(0.0, (b.adjoint() * marginal * b)(0, 0).real());
    }
    return {block.j, int(sample_index(probs, rng))};
}

TestLabel test_measurement(const BlockVector& state, bool tilde, Rng& rng) {
    return test_measurement(density_of(state), tilde, rng);
}

namespace {

// U_R|A> with R known only to the simulator.
struct RotatedOptimal {
    Rotation r;
};

// After a block-diagonal measurement: |e><e| D^j(R) on block j, e = D^j(frame)|t>.
struct CollapsedIrrep {
    Spin j;
    int t = 0;
    Rotation frame;
    Rotation r;
};

using Arriving = std::variant<RotatedOptimal, BlockDensity, CollapsedIrrep>;

struct Bb84Context {
    Bb84Params params;
    ShapePtr shape;
    std::vector<Amplitude> amps;
    OutcomeDensity density;
    BlockVector a;
    Rotation g;

    Bb84Context(const Bb84Params& p, const Rotation& truth)
        : params(p),
          shape(block_shape(p.n_spins)),
          amps(optimal_amplitudes(*shape)),
          density(amps),
          a(build_A(shape, amps)),
          g(truth) {}

    TestLabel draw_test_label(Rng& rng) const {
        std::vector<double> w;
        for (const Amplitude& x : amps) w.push_back(x.value * x.value);
        const Spin j = amps[sample_index(w, rng)].j;
        std::uniform_int_distribution<int> pick(0, j.twice);
        return {j, pick(rng)};
    }

    BlockVector collapsed_vector(const CollapsedIrrep& c) const {
        const CVector e = wigner_D(c.j, c.frame).col(c.t);
        BlockVector v{shape, std::vector<CMatrix>(shape->blocks.size()), true};
        v.coeffs[*shape->index_of(c.j)] = e * (e.adjoint() * wigner_D(c.j, c.r));
        return v;
    }

    Arriving eavesdrop(Arriving state, Rng& rng) const {
        switch (params.eve.kind) {
            case EveKind::measure_reprepare: {
                // A test state is rotation invariant, so her outcome is Haar.
                Rotation guess = haar_sample(rng);
                if (const auto* s = std::get_if<RotatedOptimal>(&state)) guess = sample_outcome(s->r, density, rng).estimate;
                return RotatedOptimal{guess};
            }
            case EveKind::block_diagonal: {
                const Rotation frame = haar_sample(rng);
                if (const auto* s = std::get_if<RotatedOptimal>(&state)) {
                    // Reduced state on each H_j is maximally mixed: P(j, t) = A_j^2 / (2j+1).
                    const TestLabel jt = draw_test_label(rng);
                    return CollapsedIrrep{jt.j, jt.m, frame, s->r};
                }
                BlockDensity rho = std::get<BlockDensity>(state);
                std::vector<double> weights;
                std::vector<CMatrix> projectors;
                std::vector<std::size_t> owner;
                for (std::size_t bi = 0; bi < rho.blocks.size(); ++bi) {
                    const DensityBlock& b = rho.blocks[bi];
                    const CMatrix d = wigner_D(b.j, frame);
                    for (int t = 0; t < b.j.dim(); ++t) {
                        CMatrix p = CMatrix::Zero(b.rho.rows(), b.rho.cols());
                        const CMatrix et = d.col(t) * d.col(t).adjoint();
                        for (int x = 0; x < b.j.dim(); ++x)
                            for (int y = 0; y < b.j.dim(); ++y)
                                for (int u = 0; u < b.trunc; ++u) p(x * b.trunc + u, y * b.trunc + u) = et(x, y);
                        weights.push_back(std::max(0.0, (p * b.rho).trace().real()));
                        projectors.push_back(std::move(p));
                        owner.push_back(bi);
                    }
                }
                const std::size_t k = sample_index(weights, rng);
                DensityBlock post = rho.blocks[owner[k]];
                post.rho = projectors[k] * post.rho * projectors[k] / weights[k];
                rho.blocks = {post};
                return rho;
            }
            default:
                return state;
        }
    }

    Rotation measure_orientation(const Arriving& state, Rng& rng) const {
        if (const auto* s = std::get_if<RotatedOptimal>(&state)) return sample_outcome(s->r, density, rng).estimate;
        if (const auto* c = std::get_if<CollapsedIrrep>(&state)) {
            // Outcome density d |D^j_tt(x)|^2 with x = frame^-1 R h_B^-1 frame.
            for (;;) {
                const Rotation x = haar_sample(rng);
                const double p = std::norm(wigner_D(c->j, x)(c->t, c->t));
                if (uniform01(rng) < p)
                    return compose(compose(compose(c->frame, x.inverse()), c->frame.inverse()), c->r);
            }
        }
        // Rotation-invariant mixed state: every outcome equally likely.
        return haar_sample(rng);
    }

    TestLabel measure_test(const Arriving& state, bool tilde, Rng& rng) const {
        if (const auto* s = std::get_if<RotatedOptimal>(&state)) return test_measurement(apply_rotation(a, s->r), tilde, rng);
        if (const auto* c = std::get_if<CollapsedIrrep>(&state)) return test_measurement(collapsed_vector(*c), tilde, rng);
        return test_measurement(std::get<BlockDensity>(state), tilde, rng);
    }

    Round operator()(std::int64_t, Rng& rng) const {
        Round r;
        const double ua = uniform01(rng);
        r.prep = ua < 0.5 ? Preparation::orientation : (ua < 0.75 ? Preparation::tau : Preparation::tau_tilde);
        const double ub = uniform01(rng);
        r.meas = ub < 0.5 ? Measurement::orientation : (ub < 0.75 ? Measurement::v : Measurement::v_tilde);

        Arriving state;
        if (r.prep == Preparation::orientation) {
            r.h = haar_sample(rng);
            state = RotatedOptimal{compose(g, r.h)};
        } else {
            r.sent = draw_test_label(rng);
            state = make_test_state(shape, r.sent.j, r.sent.m, r.prep == Preparation::tau_tilde);
        }
        state = eavesdrop(std::move(state), rng);

        if (r.meas == Measurement::orientation)
            r.bob_estimate = measure_orientation(state, rng);
        else
            r.received = measure_test(state, r.meas == Measurement::v_tilde, rng);

        r.kept = (r.prep == Preparation::orientation && r.meas == Measurement::orientation) ||
                 (r.prep == Preparation::tau && r.meas == Measurement::v) ||
                 (r.prep == Preparation::tau_tilde && r.meas == Measurement::v_tilde);
        r.mismatch = r.kept && r.prep != Preparation::orientation && !(r.received == r.sent);
        return r;
    }
};

Rotation draw_truth(std::uint64_t seed) {
    Rng rng = make_stream(seed, std::numeric_limits<std::uint64_t>::max());
    return haar_sample(rng);
}

void validate(const Bb84Params& p) {
    if (p.n_spins < 3) throw DegenerateStateError("bb84 protocol needs N >= 3");
    if (p.rounds < 8) throw std::invalid_argument("bb84 protocol needs at least 8 rounds");
}

Bb84Result reduce(const Bb84Context& ctx, std::vector<Round> rounds) {
    Bb84Result res;
    res.rounds = std::int64_t(rounds.size());
    res.truth = ctx.g;
    std::vector<Rotation> frame_estimates;
    double sum2 = 0.0;
    for (const Round& r : rounds) {
        if (!r.kept) continue;
        if (r.prep == Preparation::orientation) {
            ++res.kept_orientation;
            // Alice reveals h; Bob's outcome estimates g h.
            const Rotation g_hat = compose(r.bob_estimate, r.h.inverse());
            frame_estimates.push_back(g_hat);
            const double e = frame_error(g_hat, ctx.g);
            sum2 += e * e;
        } else {
            ++res.kept_test;
            if (r.mismatch) ++res.mismatches;
        }
    }
    res.kept_fraction = double(res.kept_orientation + res.kept_test) / double(res.rounds);
    res.detection_defined = res.kept_test > 0;
    if (res.detection_defined) {
        res.mismatch_rate = double(res.mismatches) / double(res.kept_test);
        res.detection = res.mismatch_rate > ctx.params.threshold;
    }
    if (!frame_estimates.empty()) {
        res.frame_error = frame_error(average_rotation(frame_estimates), ctx.g);
        res.round_rms = std::sqrt(sum2 / double(frame_estimates.size()));
    }
    if (ctx.params.keep_transcript) res.transcript = std::move(rounds);
    return res;
}

}  // namespace

Bb84Result run_bb84(const Bb84Params& params, std::uint64_t seed, Jobs jobs) {
    validate(params);
    const Bb84Context ctx(params, draw_truth(seed));
    return reduce(ctx, map_trials<Round>(params.rounds, seed, jobs, ctx));
}

Bb84Result run_bb84_serial(const Bb84Params& params, std::uint64_t seed) {
    validate(params);
    const Bb84Context ctx(params, draw_truth(seed));
    return reduce(ctx, map_trials_serial<Round>(params.rounds, seed, ctx));
}

}  // namespace srf
