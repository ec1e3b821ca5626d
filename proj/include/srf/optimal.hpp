#pragma once

#include "srf/eve.hpp"
#include "srf/parallel.hpp"
#include "srf/rep_space.hpp"
#include "srf/rng.hpp"

#include <cstdint>
#include <vector>

namespace srf {

/// Class-angle density of the relative rotation h^-1 g under the covariant
/// orientation measurement:
///   q(w) = (1/pi) sin^2(w/2) (sum_j A_j chi_j(w))^2  on [0, 2pi].
/// Tabulated CDF with monotone cubic Hermite interpolation for inverse sampling.
class OutcomeDensity {
public:
    explicit OutcomeDensity(std::vector<Amplitude> amplitudes, int grid_points = 8192);

    const std::vector<Amplitude>& amplitudes() const { return amplitudes_; }
    /// sum_j A_j chi_j(w) = <B| U_k^dagger |A> for class angle w of k.
    double amplitude(double omega) const;
    /// Exact q(w).
    double operator()(double omega) const;
    /// Integral of q over [0, 2pi] from the tabulation.
    double total_mass() const { return mass_; }
    int grid_points() const { return int(grid_.size()) - 1; }
    double cdf(double omega) const;
    double inverse_cdf(double u) const;

private:
    std::vector<Amplitude> amplitudes_;
    std::vector<double> grid_;
    std::vector<double> pdf_;
    std::vector<double> cdf_;
    double mass_ = 0.0;

    double cell_value(std::size_t cell, double omega) const;
};

OutcomeDensity outcome_density(const BlockShape& shape);

struct FrameEstimate {
    Rotation estimate;
    Rotation relative;   // k = g^-1 h
    double error_angle = 0.0;
};

/// Exact draw from the continuous POVM: class angle by inverse CDF, axis uniform.
FrameEstimate sample_outcome(const Rotation& g, const OutcomeDensity& density, Rng& rng);

/// Rotation about a uniform axis with class angle drawn from the density.
Rotation sample_relative(const OutcomeDensity& density, Rng& rng);

struct OptimalParams {
    int n_spins = 16;
    std::int64_t trials = 1000;
    bool randomized = true;
    EveModel eve;
    /// Largest N at which randomized runs check the block amplitudes per trial.
    int invariance_check_max_n = 16;
};

struct ErrorStats {
    double rms = 0.0;
    double rms_stderr = 0.0;
    double mean = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
    double max = 0.0;
};

ErrorStats error_stats(std::vector<double> errors);

struct OptimalResult {
    int n_spins = 0;
    std::int64_t trials = 0;
    ErrorStats stats;
    SeedCount bits;
    std::int64_t invariance_checked = 0;
    double invariance_max_dev = 0.0;
};

OptimalResult run_optimal(const OptimalParams& params, std::uint64_t seed, Jobs jobs = {});
/// Serial reference of run_optimal.
OptimalResult run_optimal_serial(const OptimalParams& params, std::uint64_t seed);

/// |<B_s| U_x^dagger |A_s>|^2 averaged over the given seeds; with seed_known
/// false the POVM is the unrandomized one.
double eve_outcome_density(const ShapePtr& shape, const std::vector<SeedSequence>& seeds, const Rotation& x,
                           bool seed_known);

struct EveViewResult {
    std::int64_t trials = 0;
    double resultant_length = 0.0;  // mean resultant of Eve's z-axis estimates relative to truth
    double rms_error = 0.0;
    double acceptance_rate = 0.0;
};

/// Eve measures seed-randomized states with the orientation POVM. Outcomes are
/// drawn by rejection from the block amplitudes.
EveViewResult eve_view_uniformity(int n_spins, std::int64_t trials, std::uint64_t seed, bool seed_known = false,
                                  Jobs jobs = {});

}  // namespace srf
