#pragma once

// Per-day maximum likelihood for (a_t, s_t, p_t), the country estimate a_t * s_t with a
// Wald interval from the observed information, and plug-in county posteriors.

#include "sae/date.hpp"
#include "sae/generation_time.hpp"
#include "sae/incidence_panel.hpp"
#include "sae/model.hpp"
#include "sae/optim.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sae
{

enum class SkipReason
{
    None,
    /// Phi is truncated by missing history.
    BurnIn,
    /// No active cases anywhere; the likelihood carries no information.
    ZeroPhi,
};

std::string_view to_string(SkipReason reason);

struct Interval
{
    double lower = 0.0;
    double upper = 0.0;
};

struct DayFit
{
    Date date;
    std::size_t day_index = 0;
    DayParams params;
    double r_tilde = 0.0;
    std::optional<Interval> r_tilde_ci;
    SkipReason skipped = SkipReason::None;

    bool is_skipped() const { return skipped != SkipReason::None; }
};

struct CountyEstimate
{
    Date date;
    std::size_t day_index = 0;
    std::string region_id;
    double posterior_mean = 0.0;
    /// One value per FitConfig::quantiles entry.
    std::vector<double> quantiles;
    double lambda = 0.0;
    std::int64_t cases = 0;
};

struct FitConfig
{
    double level = 0.95;
    std::vector<double> quantiles{0.05, 0.5, 0.95};
    /// Days skipped at the start of a panel; defaults to the largest generation-time lag.
    std::optional<std::size_t> burn_in;
    optim::NelderMeadOptions optimizer{};
    /// Simplex restarts from the previous optimum after the first run.
    int restarts = 1;
    double hessian_step = 1e-4;
    /// Holds p at this value instead of estimating it.
    std::optional<double> fixed_p;
    /// Worker threads for fit_panel; 0 picks the hardware concurrency.
    unsigned threads = 1;

    /// Throws InvalidConfiguration on out-of-range values.
    void validate() const;
};

/// Negative log-likelihood of one day, with counts and Phi fixed.
///
/// Groups counties by count value so the ln Gamma terms are evaluated once per
/// distinct count. Impossible observations (I > 0 with zero mean) contribute the
/// finite sentinel -kLogZeroSentinel.
class DayLikelihood
{
public:
    DayLikelihood(std::span<const double> phi, std::span<const std::int64_t> counts);

    double operator()(double a, double s, double p) const;

    double phi_total() const { return m_phi_total; }
    std::size_t num_regions() const { return m_phi.size(); }
    std::span<const double> phi() const { return m_phi; }

private:
    std::vector<double> m_phi;
    std::vector<double> m_counts;
    std::vector<std::pair<std::int64_t, double>> m_count_multiplicity;
    double m_phi_total = 0.0;
    double m_log_factorials = 0.0;
};

/// -sum_c log NB(I_c(t); a, s * Lambda_c(t)).
double day_neg_loglik(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t, double a, double s,
                      double p);

/// Wald interval for a * s by the delta method, truncated below at zero. Empty when the
/// covariance is absent or the propagated variance is negative or not finite.
std::optional<Interval> r_tilde_ci(const DayParams& params, double level);

DayFit fit_day(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t, const FitConfig& config = {});

/// One DayFit per panel day (burn-in days included, flagged as skipped). Days are fitted
/// independently, so the result does not depend on config.threads.
std::vector<DayFit> fit_panel(const IncidencePanel& panel, const GenerationTimePmf& w, const FitConfig& config = {});

/// Plug-in posterior summaries for every region on every unskipped day.
std::vector<CountyEstimate> county_estimates(const IncidencePanel& panel, const GenerationTimePmf& w,
                                             std::span<const DayFit> fits, const FitConfig& config = {});

/// Shifts dates back by `days` (infection-to-report delay). Day indices are kept.
std::vector<DayFit> backdate(std::vector<DayFit> fits, long days);
std::vector<CountyEstimate> backdate(std::vector<CountyEstimate> estimates, long days);

} // namespace sae
