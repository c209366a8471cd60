#pragma once

// Discrete-time branching process on the flat torus [0, k)^2 with Gaussian offspring
// dispersal. Each unit square is a county; the output is the county-by-day incidence.
//
// Draw order (the reproducibility contract, one std::mt19937_64 stream per run):
//   1. seeds, in order: x uniform, y uniform, infection age uniform on the support of w
//   2. per day: if per-county Gamma reproduction numbers are enabled, one Gamma draw per
//      county in county order; then every active individual in creation order draws its
//      offspring count, and each offspring one Box-Muller pair for its displacement.

#include "sae/date.hpp"
#include "sae/generation_time.hpp"
#include "sae/incidence_panel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sae
{

struct SchedulePhase
{
    int days = 1;
    double r = 1.0;
};

struct SimConfig
{
    int k = 20;
    double sigma = 0.14;
    std::vector<SchedulePhase> schedule{{20, 2.5}, {40, 0.7}, {40, 1.2}};
    std::int64_t initial_cases = 400;
    GenerationTimePmf w = default_generation_time();
    std::uint64_t seed = 1;
    Date start_date{2020, 3, 1};
    /// When set, R_c(t) ~ Gamma(shape, R(t) / shape) independently per county and day
    /// instead of R_c(t) = R(t).
    std::optional<double> county_r_shape;

    /// Throws InvalidConfiguration when a precondition fails.
    void validate() const;
    int num_days() const;
    /// R(t) for day index t (0-based).
    double r_at(int t) const;
};

struct Infection
{
    double x = 0.0;
    double y = 0.0;
    /// Day index; seeds have negative days (before the panel starts).
    int infection_day = 0;
    int county = 0;
};

struct SimResult
{
    /// k^2 regions over the schedule's days. Seeds are not part of the panel; they were
    /// infected before its first day and only shape the first burn-in window.
    IncidencePanel panel;
    std::vector<double> true_r;
    /// Realized share of offspring landing outside their parent's county.
    double cross_county_fraction = 0.0;
    std::int64_t seeded = 0;
    std::int64_t offspring = 0;
};

/// County id of unit square (column x, row y): "c" followed by the zero-padded index y * k + x.
std::string county_id(int k, int index);

/// Maps a coordinate into [0, k).
double wrap_torus(double v, double k);

SimResult simulate(const SimConfig& config);

/// Monte Carlo estimate of the probability that a uniform point of a unit square, displaced by
/// N(0, sigma^2 I), lands in a different square of the k x k torus. The same seed yields the
/// same underlying draws for every sigma, so the estimate is monotone in sigma for small sigma.
double cross_county_fraction(double sigma, std::int64_t samples, std::uint64_t seed, int k = 20);

/// Bisection on sigma so that cross_county_fraction(sigma) = target to within `tol` in sigma.
/// Throws InvalidConfiguration if the target is outside what the torus can produce.
double calibrate_sigma(double target_fraction, double tol, std::uint64_t seed, std::int64_t samples = 1'000'000,
                       int k = 20);

} // namespace sae
