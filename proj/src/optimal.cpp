#include "srf/optimal.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srf {

OutcomeDensity::OutcomeDensity(std::vector<Amplitude> amplitudes, int grid_points)
    : amplitudes_(std::move(amplitudes)) {
    if (grid_points < 4096) throw std::invalid_argument("outcome density needs at least 4096 grid points");
    const std::size_t g = static_cast<std::size_t>(grid_points);
    grid_.resize(g + 1);
    pdf_.resize(g + 1);
    cdf_.assign(g + 1, 0.0);
    const double h = 2.0 * kPi / double(g);
    for (std::size_t i = 0; i <= g; ++i) {
        grid_[i] = i == g ? 2.0 * kPi : h * double(i);
        pdf_[i] = (*this)(grid_[i]);
    }
    const auto q = [this](double w) { return (*this)(w); };
    for (std::size_t i = 0; i < g; ++i)
        cdf_[i + 1] = cdf_[i] + boost::math::quadrature::gauss<double, 15>::integrate(q, grid_[i], grid_[i + 1]);
    mass_ = cdf_[g];
    for (double& c : cdf_) c /= mass_;
    cdf_[g] = 1.0;
}

double OutcomeDensity::amplitude(double omega) const {
    double s = 0.0;
    for (const Amplitude& a : amplitudes_) s += a.value * character(a.j, omega);
    return s;
}

double OutcomeDensity::operator()(double omega) const {
    const double a = amplitude(omega);
    return class_measure(omega) * a * a;
}

double OutcomeDensity::cell_value(std::size_t cell, double omega) const {
    // Monotone cubic Hermite (Fritsch-Carlson limited) with the exact slopes q.
    const double x0 = grid_[cell];
    const double h = grid_[cell + 1] - x0;
    const double f0 = cdf_[cell];
    const double f1 = cdf_[cell + 1];
    const double delta = (f1 - f0) / h;
    double m0 = pdf_[cell] / mass_;
    double m1 = pdf_[cell + 1] / mass_;
    if (delta <= 0.0) {
        m0 = m1 = 0.0;
    } else {
        const double a = m0 / delta;
        const double b = m1 / delta;
        const double r = a * a + b * b;
        if (r > 9.0) {
            const double tau = 3.0 / std::sqrt(r);
            m0 *= tau;
            m1 *= tau;
        }
    }
    const double t = (omega - x0) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * f1 +
           (t3 - t2) * h * m1;
}

double OutcomeDensity::cdf(double omega) const {
    if (omega <= 0.0) return 0.0;
    if (omega >= 2.0 * kPi) return 1.0;
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), omega);
    const std::size_t cell = std::min<std::size_t>(std::size_t(it - grid_.begin()) - 1, grid_.size() - 2);
    return cell_value(cell, omega);
}

double OutcomeDensity::inverse_cdf(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return 2.0 * kPi;
    const std::size_t cell = it == cdf_.begin() ? 0 : std::size_t(it - cdf_.begin()) - 1;
    double lo = grid_[cell];
    double hi = grid_[cell + 1];
    for (int iter = 0; iter < 60 && hi - lo > 1e-15; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (cell_value(cell, mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

OutcomeDensity outcome_density(const BlockShape& shape) { return OutcomeDensity(optimal_amplitudes(shape)); }

Rotation sample_relative(const OutcomeDensity& density, Rng& rng) {
    const double omega = density.inverse_cdf(uniform01(rng));
    return Rotation::from_axis_angle(uniform_direction(rng), omega);
}

FrameEstimate sample_outcome(const Rotation& g, const OutcomeDensity& density, Rng& rng) {
    FrameEstimate e;
    e.relative = sample_relative(density, rng);
    e.estimate = compose(g, e.relative);
    e.error_angle = so3_error_angle(e.relative);
    return e;
}

ErrorStats error_stats(std::vector<double> errors) {
    ErrorStats s;
    if (errors.empty()) return s;
    const double n = double(errors.size());
    double sum = 0.0;
    double sum2 = 0.0;
    for (double e : errors) {
        sum += e;
        sum2 += e * e;
    }
    s.mean = sum / n;
    const double mean2 = sum2 / n;
    s.rms = std::sqrt(mean2);
    if (errors.size() > 1 && s.rms > 0.0) {
        double var = 0.0;
        for (double e : errors) var += (e * e - mean2) * (e * e - mean2);
        var /= (n - 1.0);
        s.rms_stderr = std::sqrt(var / n) / (2.0 * s.rms);
    }
    std::sort(errors.begin(), errors.end());
    const auto pct = [&](double p) { return errors[std::min(errors.size() - 1, std::size_t(p * (n - 1) + 0.5))]; };
    s.p50 = pct(0.5);
    s.p90 = pct(0.9);
    s.max = errors.back();
    return s;
}

namespace {

struct OptimalTrial {
    double error = 0.0;
    double deviation = 0.0;
    bool checked = false;
};

struct OptimalContext {
    OptimalParams params;
    ShapePtr shape;
    OutcomeDensity density;
    BlockVector a;
    BlockVector b;
    std::vector<Spin> support;

    explicit OptimalContext(const OptimalParams& p)
        : params(p),
          shape(block_shape(p.n_spins)),
          density(optimal_amplitudes(*shape)),
          a(build_A(shape)),
          b(build_B(shape)),
          support(a.support()) {}

    OptimalTrial operator()(std::int64_t, Rng& rng) const {
        OptimalTrial t;
        const Rotation g = haar_sample(rng);
        Rotation arriving = g;
        if (params.eve.kind == EveKind::measure_reprepare) arriving = sample_outcome(g, density, rng).estimate;
        const FrameEstimate bob = sample_outcome(arriving, density, rng);
        t.error = frame_error(bob.estimate, g);
        // Drawn last so that randomized and plain runs share every other draw.
        SeedSequence seed;
        if (params.randomized) seed = random_seed(support, rng);

        if (params.randomized && params.n_spins <= params.invariance_check_max_n) {
            // Seed-matched state and POVM must reproduce the character amplitude.
            const BlockVector as = randomize(a, seed);
            const BlockVector bs = randomize(b, seed);
            const Rotation x = bob.relative.inverse();
            const double block = std::norm(inner(bs, apply_rotation(as, x)));
            const double reduced = std::pow(density.amplitude(class_angle(x)), 2);
            t.deviation = std::abs(block - reduced);
            t.checked = true;
        }
        return t;
    }
};

OptimalResult reduce(const OptimalContext& ctx, const std::vector<OptimalTrial>& trials) {
    OptimalResult r;
    r.n_spins = ctx.params.n_spins;
    r.trials = std::int64_t(trials.size());
    std::vector<double> errors;
    errors.reserve(trials.size());
    for (const OptimalTrial& t : trials) {
        errors.push_back(t.error);
        if (t.checked) {
            ++r.invariance_checked;
            r.invariance_max_dev = std::max(r.invariance_max_dev, t.deviation);
        }
    }
    r.stats = error_stats(std::move(errors));
    r.bits = seed_count(*ctx.shape);
    return r;
}

void validate(const OptimalParams& p) {
    if (p.n_spins < 3) throw DegenerateStateError("optimal protocol needs N >= 3");
    if (p.trials < 1) throw std::invalid_argument("trials must be positive");
}

}  // namespace

OptimalResult run_optimal(const OptimalParams& params, std::uint64_t seed, Jobs jobs) {
    validate(params);
    const OptimalContext ctx(params);
    return reduce(ctx, map_trials<OptimalTrial>(params.trials, seed, jobs, ctx));
}

OptimalResult run_optimal_serial(const OptimalParams& params, std::uint64_t seed) {
    validate(params);
    const OptimalContext ctx(params);
    return reduce(ctx, map_trials_serial<OptimalTrial>(params.trials, seed, ctx));
}

double eve_outcome_density(const ShapePtr& shape, const std::vector<SeedSequence>& seeds, const Rotation& x,
                           bool seed_known) {
    const BlockVector a = build_A(shape);
    const BlockVector b = build_B(shape);
    double sum = 0.0;
    for (const SeedSequence& s : seeds) {
        const BlockVector as = randomize(a, s);
        const BlockVector& povm = seed_known ? randomize(b, s) : b;
        sum += std::norm(inner(povm, apply_rotation(as, x)));
    }
    return sum / double(seeds.size());
}

namespace {

struct EveTrial {
    Vec3 z_axis = Vec3::Zero();
    double error = 0.0;
    std::int64_t proposals = 0;
};

}  // namespace

EveViewResult eve_view_uniformity(int n_spins, std::int64_t trials, std::uint64_t seed, bool seed_known,
                                  Jobs jobs) {
    if (n_spins < 3) throw DegenerateStateError("eve_view_uniformity needs N >= 3");
    const ShapePtr shape = block_shape(n_spins);
    const std::vector<Amplitude> amps = optimal_amplitudes(*shape);
    const BlockVector a = build_A(shape, amps);
    const BlockVector b = build_B(shape);
    const std::vector<Spin> support = a.support();
    double bound = 0.0;
    for (const Amplitude& amp : amps) bound += std::abs(amp.value) * amp.j.dim();
    bound *= bound;

    const auto kernel = [&](std::int64_t, Rng& rng) {
        const SeedSequence s = random_seed(support, rng);
        const BlockVector as = randomize(a, s);
        const BlockVector bs = seed_known ? randomize(b, s) : b;
        EveTrial t;
        // x = h^-1 g is Haar under the proposal; accept with |amplitude|^2 / bound.
        for (;;) {
            ++t.proposals;
            const Rotation x = haar_sample(rng);
            const double p = std::norm(inner(bs, apply_rotation(as, x))) / bound;
            if (uniform01(rng) < p) {
                t.z_axis = x.inverse().rotate(Vec3::UnitZ());
                t.error = so3_error_angle(x);
                return t;
            }
        }
    };
    const std::vector<EveTrial> out = map_trials<EveTrial>(trials, seed, jobs, kernel);

    EveViewResult r;
    r.trials = trials;
    Vec3 sum = Vec3::Zero();
    double sum2 = 0.0;
    std::int64_t proposals = 0;
    for (const EveTrial& t : out) {
        sum += t.z_axis;
        sum2 += t.error * t.error;
        proposals += t.proposals;
    }
    r.resultant_length = (sum / double(trials)).norm();
    r.rms_error = std::sqrt(sum2 / double(trials));
    r.acceptance_rate = double(trials) / double(proposals);
    return r;
}

}  // namespace srf
