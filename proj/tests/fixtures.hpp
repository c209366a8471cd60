#pragma once

#include "sae/generation_time.hpp"
#include "sae/incidence_panel.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fixtures
{

inline std::vector<std::string> region_names(std::size_t k)
{
    std::vector<std::string> ids;
    for (std::size_t c = 0; c < k; ++c) {
        ids.push_back("r" + std::to_string(100 + c));
    }
    return ids;
}

// Point-mass generation time at lag 1: on day 1 of a two-day panel Phi equals the day-0 counts.
inline sae::GenerationTimePmf lag_one()
{
    return sae::GenerationTimePmf(1, {1.0});
}

inline sae::IncidencePanel single_day(const std::vector<std::int64_t>& phi, const std::vector<std::int64_t>& counts)
{
    std::vector<std::int64_t> cells(phi);
    cells.insert(cells.end(), counts.begin(), counts.end());
    return sae::IncidencePanel(region_names(phi.size()), sae::Date(2020, 4, 1), 2, cells);
}

// Day-1 counts I_c ~ Pois(R_c Lambda_c) with R_c ~ Gamma(a, s) and Lambda from phi and p.
inline std::vector<std::int64_t> draw_day(std::mt19937_64& rng, const std::vector<std::int64_t>& phi, double a,
                                          double s, double p)
{
    const std::size_t k = phi.size();
    double total = 0.0;
    for (auto v : phi) {
        total += static_cast<double>(v);
    }
    std::gamma_distribution<double> gamma(a, s);
    std::vector<std::int64_t> counts(k);
    for (std::size_t c = 0; c < k; ++c) {
        const double own = static_cast<double>(phi[c]);
        const double lambda = (1.0 - p) * own + p * (total - own) / static_cast<double>(k - 1);
        std::poisson_distribution<std::int64_t> poisson(gamma(rng) * lambda);
        counts[c] = lambda > 0.0 ? poisson(rng) : 0;
    }
    return counts;
}

// K regions, every region Poisson with the same R; the first `warm` days hold `level` cases
// so Phi starts near `level` once the generation window is full.
inline sae::IncidencePanel homogeneous_panel(std::mt19937_64& rng, std::size_t k, std::size_t days, double r,
                                             double level, const sae::GenerationTimePmf& w)
{
    std::vector<std::int64_t> counts(k * days);
    const auto warm = static_cast<std::size_t>(w.support_end());
    for (std::size_t t = 0; t < days; ++t) {
        for (std::size_t c = 0; c < k; ++c) {
            double mean = level;
            if (t >= warm) {
                mean = 0.0;
                for (int tau = w.support_start(); tau <= w.support_end(); ++tau) {
                    mean += w(tau) * static_cast<double>(counts[(t - static_cast<std::size_t>(tau)) * k + c]);
                }
                mean *= r;
            }
            std::poisson_distribution<std::int64_t> poisson(mean);
            counts[t * k + c] = poisson(rng);
        }
    }
    return sae::IncidencePanel(region_names(k), sae::Date(2020, 5, 1), days, counts);
}

} // namespace fixtures
