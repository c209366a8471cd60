#include "sae/generation_time.hpp"

#include "sae/errors.hpp"

#include <cmath>
#include <numeric>

namespace sae
{

GenerationTimePmf::GenerationTimePmf(int support_start, std::vector<double> weights)
    : m_start(support_start)
    , m_weights(std::move(weights))
    , m_mean(0.0)
{
    if (m_start < 1) {
        throw InvalidConfiguration("generation time support must start at day 1 or later");
    }
    if (m_weights.empty()) {
        throw InvalidConfiguration("generation time pmf needs at least one weight");
    }
    double total = 0.0;
    for (double w : m_weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw InvalidConfiguration("generation time weights must be finite and nonnegative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw InvalidConfiguration("generation time weights sum to zero");
    }
    for (double& w : m_weights) {
        w /= total;
    }
    for (std::size_t j = 0; j < m_weights.size(); ++j) {
        m_mean += static_cast<double>(m_start + static_cast<int>(j)) * m_weights[j];
    }
}

double GenerationTimePmf::operator()(int tau) const
{
    if (tau < m_start || tau > support_end()) {
        return 0.0;
    }
    return m_weights[static_cast<std::size_t>(tau - m_start)];
}

GenerationTimePmf trapezoid_pmf(int support_start, int ramp_up_len, int plateau_len, int ramp_down_len)
{
    if (ramp_up_len < 0 || plateau_len < 0 || ramp_down_len < 0) {
        throw InvalidConfiguration("trapezoid segment lengths must be nonnegative");
    }
    if (ramp_up_len + plateau_len + ramp_down_len == 0) {
        throw InvalidConfiguration("trapezoid has zero total length");
    }
    if (support_start < 1) {
        throw InvalidConfiguration("generation time support must start at day 1 or later");
    }
    // Heights 1..n on the ramp, n + 1 on the plateau. With (1, 1, 1) this gives 1, 2, 1.
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(ramp_up_len + plateau_len + ramp_down_len));
    for (int j = 1; j <= ramp_up_len; ++j) {
        weights.push_back(j);
    }
    const double height = ramp_up_len + 1;
    for (int j = 0; j < plateau_len; ++j) {
        weights.push_back(height);
    }
    for (int j = ramp_down_len; j >= 1; --j) {
        weights.push_back(height * j / (ramp_down_len + 1));
    }
    return GenerationTimePmf{support_start, std::move(weights)};
}

GenerationTimePmf default_generation_time()
{
    return trapezoid_pmf(1, 3, 4, 3);
}

} // namespace sae
