#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sae
{

/// Discrete generation-time distribution w(tau) on the integer days
/// support_start, ..., support_start + size() - 1.
class GenerationTimePmf
{
public:
    /// Normalizes `weights` to sum 1. Throws InvalidConfiguration if the support
    /// starts before day 1, any weight is negative or non-finite, or the total is zero.
    GenerationTimePmf(int support_start, std::vector<double> weights);

    int support_start() const { return m_start; }
    /// Largest lag with (possibly) nonzero weight.
    int support_end() const { return m_start + static_cast<int>(m_weights.size()) - 1; }
    std::size_t size() const { return m_weights.size(); }

    std::span<const double> weights() const { return m_weights; }

    /// w(tau); zero outside the support.
    double operator()(int tau) const;

    double mean() const { return m_mean; }

private:
    int m_start;
    std::vector<double> m_weights;
    double m_mean;
};

/// Trapezoid with weights 1, 2, ..., ramp_up over the ramp-up, flat at ramp_up + 1 over the
/// plateau, then the mirror image of the ramp-up over ramp_down days, normalized.
///
/// (1, 3, 4, 3) yields weights proportional to 1,2,3,4,4,4,4,3,2,1 on days 1-10 (mean 5.5).
GenerationTimePmf trapezoid_pmf(int support_start, int ramp_up_len, int plateau_len, int ramp_down_len);

/// Default used by the CLI and the simulator: trapezoid_pmf(1, 3, 4, 3).
GenerationTimePmf default_generation_time();

} // namespace sae
