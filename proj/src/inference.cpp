#include "sae/inference.hpp"

#include "sae/errors.hpp"
#include "sae/simd/kernels.hpp"
#include "sae/special_functions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace sae
{
namespace
{

std::size_t burn_in_days(const GenerationTimePmf& w, const FitConfig& config)
{
    return config.burn_in.value_or(static_cast<std::size_t>(w.support_end()));
}

// Method of moments on the crude ratios I_c / Phi_c.
optim::NaturalParams moment_start(std::span<const double> phi, std::span<const std::int64_t> counts)
{
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t c = 0; c < phi.size(); ++c) {
        if (phi[c] > 0.0) {
            const double ratio = static_cast<double>(counts[c]) / phi[c];
            n += 1.0;
            const double delta = ratio - mean;
            mean += delta / n;
            m2 += delta * (ratio - mean);
        }
    }
    const double var = n > 0.0 ? m2 / n : 0.0;
    const double s0 = mean > 0.0 ? std::max(var / mean, 0.01) : 0.5;
    const double a0 = std::max(mean / s0, 0.05);
    return {a0, s0, 0.1};
}

struct FitOutcome
{
    optim::NaturalParams params;
    double value = 0.0;
    bool converged = false;
    bool p_at_clamp = false;
};

template <std::size_t N>
optim::OptimResult<N> minimize(const std::function<double(const Vector<N>&)>& objective, const Vector<N>& start,
                               const FitConfig& config)
{
    auto best = optim::nelder_mead<N>(objective, start, config.optimizer);
    for (int r = 0; r < config.restarts; ++r) {
        auto again = optim::nelder_mead<N>(objective, best.argmin, config.optimizer);
        if (again.value <= best.value) {
            best = again;
        }
        else {
            break;
        }
    }
    return best;
}

FitOutcome run_optimizer(const DayLikelihood& likelihood, const optim::NaturalParams& start, const FitConfig& config)
{
    FitOutcome out;
    if (config.fixed_p) {
        const double p = *config.fixed_p;
        const std::function<double(const Vector<2>&)> objective = [&](const Vector<2>& u) {
            return likelihood(std::exp(u[0]), std::exp(u[1]), p);
        };
        const auto res = minimize<2>(objective, {std::log(start.a), std::log(start.s)}, config);
        out.params = {std::exp(res.argmin[0]), std::exp(res.argmin[1]), p};
        out.value = res.value;
        out.converged = res.converged;
        return out;
    }
    const std::function<double(const Vec3&)> objective = [&](const Vec3& u) {
        const auto natural = optim::from_transformed(u);
        return likelihood(natural.a, natural.s, natural.p);
    };
    const auto res = minimize<3>(objective, optim::to_transformed(start), config);
    out.params = optim::from_transformed(res.argmin);
    out.value = res.value;
    out.converged = res.converged;
    out.p_at_clamp = std::abs(res.argmin[2]) >= optim::kLogitClamp;
    return out;
}

// Observed information is taken in (mu, kappa, p) = (a s, 1/a, p). That chart stays regular
// through the Poisson limit kappa -> 0, where a grows without bound and s collapses to zero.
enum Coordinate : std::size_t
{
    kMean = 0,
    kDispersion = 1,
    kTransfer = 2,
};

struct BlockInverse
{
    std::optional<Mat3> cov; // over (mu, kappa, p); held coordinates have zero rows
    double transfer_curvature = 0.0;
};

template <std::size_t N>
BlockInverse invert_block(const std::function<double(const Vec3&)>& objective, const Vec3& at,
                          const std::array<std::size_t, N>& free, double step)
{
    const std::function<double(const Vector<N>&)> restricted = [&](const Vector<N>& x) {
        Vec3 full = at;
        for (std::size_t j = 0; j < N; ++j) {
            full[free[j]] = x[j];
        }
        return objective(full);
    };
    Vector<N> point{};
    for (std::size_t j = 0; j < N; ++j) {
        point[j] = at[free[j]];
    }
    const auto hess = optim::numeric_hessian<N>(restricted, point, step);
    BlockInverse out;
    for (std::size_t j = 0; j < N; ++j) {
        if (free[j] == kTransfer) {
            out.transfer_curvature = hess[j][j];
        }
    }
    const auto inv = optim::invert_spd<N>(hess);
    if (inv) {
        Mat3 cov{};
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) {
                cov[free[i]][free[j]] = (*inv)[i][j];
            }
        }
        out.cov = cov;
    }
    return out;
}

BlockInverse invert_free(const std::function<double(const Vec3&)>& objective, const Vec3& at,
                         const std::vector<std::size_t>& free, double step)
{
    switch (free.size()) {
    case 1:
        return invert_block<1>(objective, at, {free[0]}, step);
    case 2:
        return invert_block<2>(objective, at, {free[0], free[1]}, step);
    default:
        return invert_block<3>(objective, at, {free[0], free[1], free[2]}, step);
    }
}

// Covariance of (a, s, p) in natural coordinates. Coordinates whose central-difference
// stencil would leave the domain, or along which the likelihood is flat, are held at their
// estimates. Clears `p_identified` when p had to be held.
std::optional<Mat3> natural_covariance(const DayLikelihood& likelihood, const DayParams& params, double step,
                                       bool& p_identified)
{
    const double mean = params.a * params.s;
    const double dispersion = 1.0 / params.a;
    const Vec3 at{mean, dispersion, params.p};
    const std::function<double(const Vec3&)> objective = [&](const Vec3& v) {
        if (!(v[kMean] > 0.0) || !(v[kDispersion] > 0.0) || !(v[kTransfer] >= 0.0 && v[kTransfer] <= 1.0)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        return likelihood(1.0 / v[kDispersion], v[kMean] * v[kDispersion], v[kTransfer]);
    };

    std::vector<std::size_t> free{kMean};
    if (dispersion - step * (1.0 + dispersion) > 0.0) {
        free.push_back(kDispersion);
    }
    const double h_p = step * (1.0 + params.p);
    if (p_identified && params.p - h_p >= 0.0 && params.p + h_p <= 1.0) {
        free.push_back(kTransfer);
    }
    else {
        p_identified = false;
    }

    BlockInverse block = invert_free(objective, at, free, step);
    if (free.back() == kTransfer && block.transfer_curvature < 1e-10) {
        // flat in p (e.g. homogeneous Phi): p is not identified
        p_identified = false;
        free.pop_back();
        block = invert_free(objective, at, free, step);
    }
    if (!block.cov && free.size() > 1 && free[1] == kDispersion) {
        // information about the dispersion is too weak to invert; hold a fixed
        free.erase(free.begin() + 1);
        block = invert_free(objective, at, free, step);
    }
    if (!block.cov) {
        return std::nullopt;
    }

    // d(a, s, p) / d(mu, kappa, p)
    const Mat3 jacobian{{{0.0, -1.0 / (dispersion * dispersion), 0.0}, {dispersion, mean, 0.0}, {0.0, 0.0, 1.0}}};
    Mat3 cov{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double v = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                for (std::size_t l = 0; l < 3; ++l) {
                    v += jacobian[i][k] * (*block.cov)[k][l] * jacobian[j][l];
                }
            }
            cov[i][j] = v;
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            cov[j][i] = cov[i][j];
        }
    }
    return cov;
}

DayFit fit_day_impl(std::span<const double> phi, std::span<const std::int64_t> counts, Date date, std::size_t t,
                    std::size_t burn_in, const FitConfig& config)
{
    DayFit fit;
    fit.date = date;
    fit.day_index = t;
    if (t < burn_in) {
        fit.skipped = SkipReason::BurnIn;
        return fit;
    }
    const DayLikelihood likelihood{phi, counts};
    if (!(likelihood.phi_total() > 0.0)) {
        fit.skipped = SkipReason::ZeroPhi;
        return fit;
    }

    auto start = moment_start(phi, counts);
    if (config.fixed_p) {
        start.p = *config.fixed_p;
    }
    FitOutcome outcome;
    try {
        outcome = run_optimizer(likelihood, start, config);
    }
    catch (const NumericError&) {
        fit.params = DayParams{start.a, start.s, start.p, std::nullopt, false, false, -std::numeric_limits<double>::infinity()};
        fit.r_tilde = fit.params.mean();
        return fit;
    }

    DayParams& params = fit.params;
    params.a = outcome.params.a;
    params.s = outcome.params.s;
    params.p = outcome.params.p;
    params.converged = outcome.converged;
    params.log_likelihood = -outcome.value;
    params.p_identified = !config.fixed_p && !outcome.p_at_clamp;

    bool p_free = params.p_identified;
    try {
        params.cov = natural_covariance(likelihood, params, config.hessian_step, p_free);
    }
    catch (const NumericError&) {
        params.cov.reset();
    }
    params.p_identified = p_free;
    if (config.fixed_p) {
        params.p_identified = true;
    }

    fit.r_tilde = params.a * params.s;
    fit.r_tilde_ci = r_tilde_ci(params, config.level);
    return fit;
}

} // namespace

std::string_view to_string(SkipReason reason)
{
    switch (reason) {
    case SkipReason::None:
        return "";
    case SkipReason::BurnIn:
        return "burn_in";
    case SkipReason::ZeroPhi:
        return "zero_phi";
    }
    return "";
}

void FitConfig::validate() const
{
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidConfiguration("confidence level must lie in (0, 1)");
    }
    for (double q : quantiles) {
        if (!(q > 0.0 && q < 1.0)) {
            throw InvalidConfiguration("quantile probabilities must lie in (0, 1)");
        }
    }
    if (!std::is_sorted(quantiles.begin(), quantiles.end())) {
        throw InvalidConfiguration("quantile probabilities must be increasing");
    }
    if (!(optimizer.tol > 0.0) || optimizer.max_iter < 1) {
        throw InvalidConfiguration("optimizer tolerance and iteration cap must be positive");
    }
    if (restarts < 0) {
        throw InvalidConfiguration("restarts must be nonnegative");
    }
    if (!(hessian_step > 0.0)) {
        throw InvalidConfiguration("Hessian step must be positive");
    }
    if (fixed_p && !(*fixed_p >= 0.0 && *fixed_p <= 1.0)) {
        throw InvalidConfiguration("fixed transfer fraction must lie in [0, 1]");
    }
}

DayLikelihood::DayLikelihood(std::span<const double> phi, std::span<const std::int64_t> counts)
    : m_phi(phi.begin(), phi.end())
    , m_counts(counts.size())
{
    if (phi.size() != counts.size()) {
        throw InvalidConfiguration("phi and counts differ in length");
    }
    if (phi.size() < 2) {
        throw InvalidConfiguration("cross-region transfer needs at least two regions");
    }
    std::map<std::int64_t, double> multiplicity;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < 0) {
            throw DomainError("counts must be nonnegative");
        }
        m_counts[c] = static_cast<double>(counts[c]);
        if (counts[c] > 0) {
            multiplicity[counts[c]] += 1.0;
            m_log_factorials += log_gamma(m_counts[c] + 1.0);
        }
    }
    m_count_multiplicity.assign(multiplicity.begin(), multiplicity.end());
    m_phi_total = simd::sum(m_phi);
}

double DayLikelihood::operator()(double a, double s, double p) const
{
    if (!(a > 0.0) || !(s > 0.0) || !std::isfinite(a) || !std::isfinite(s) || !(p >= 0.0 && p <= 1.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::vector<double> lambda(m_phi.size());
    compute_lambda_into(m_phi, m_phi_total, p, lambda);

    double loglik = -m_log_factorials;
    for (const auto& [count, times] : m_count_multiplicity) {
        loglik += times * log_rising_factorial(a, count);
    }
    for (std::size_t c = 0; c < lambda.size(); ++c) {
        const double m = s * lambda[c];
        const double i = m_counts[c];
        if (m > 0.0) {
            const double log1p_m = std::log1p(m);
            loglik += (i > 0.0 ? i * std::log(m) : 0.0) - (a + i) * log1p_m;
        }
        else if (i > 0.0) {
            loglik += kLogZeroSentinel;
        }
    }
    return -loglik;
}

double day_neg_loglik(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t, double a, double s,
                      double p)
{
    if (t >= panel.num_days()) {
        throw IndexError("day index " + std::to_string(t) + " outside panel");
    }
    if (!(a > 0.0) || !(s > 0.0) || !(p >= 0.0 && p <= 1.0)) {
        throw DomainError("day_neg_loglik: parameters outside their domain");
    }
    const auto phi = compute_phi(panel, w, t);
    return DayLikelihood{phi, panel.day(t)}(a, s, p);
}

std::optional<Interval> r_tilde_ci(const DayParams& params, double level)
{
    if (!params.cov) {
        return std::nullopt;
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError("confidence level must lie in (0, 1)");
    }
    const Mat3& cov = *params.cov;
    const double a = params.a;
    const double s = params.s;
    const double variance = s * s * cov[0][0] + a * a * cov[1][1] + 2.0 * a * s * cov[0][1];
    if (!(variance >= 0.0) || !std::isfinite(variance)) {
        return std::nullopt;
    }
    const double half_width = normal_quantile(0.5 * (1.0 + level)) * std::sqrt(variance);
    const double r = a * s;
    return Interval{std::max(0.0, r - half_width), r + half_width};
}

DayFit fit_day(const IncidencePanel& panel, const GenerationTimePmf& w, std::size_t t, const FitConfig& config)
{
    config.validate();
    if (t >= panel.num_days()) {
        throw IndexError("day index " + std::to_string(t) + " outside panel");
    }
    const auto phi = compute_phi(panel, w, t);
    return fit_day_impl(phi, panel.day(t), panel.date(t), t, burn_in_days(w, config), config);
}

std::vector<DayFit> fit_panel(const IncidencePanel& panel, const GenerationTimePmf& w, const FitConfig& config)
{
    config.validate();
    const std::size_t days = panel.num_days();
    const std::size_t k = panel.num_regions();
    const auto phi = compute_phi_all(panel, w);
    const std::size_t burn_in = burn_in_days(w, config);
    const std::span<const double> all_phi{phi};

    std::vector<DayFit> fits(days);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (std::size_t t = next.fetch_add(1); t < days; t = next.fetch_add(1)) {
            try {
                fits[t] = fit_day_impl(all_phi.subspan(t * k, k), panel.day(t), panel.date(t), t, burn_in, config);
            }
            catch (...) {
                const std::lock_guard lock{error_mutex};
                if (!error) {
                    error = std::current_exception();
                }
                next.store(days);
            }
        }
    };
    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, days));
    if (threads <= 1) {
        worker();
    }
    else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return fits;
}

std::vector<CountyEstimate> county_estimates(const IncidencePanel& panel, const GenerationTimePmf& w,
                                             std::span<const DayFit> fits, const FitConfig& config)
{
    config.validate();
    const std::size_t k = panel.num_regions();
    const auto phi = compute_phi_all(panel, w);
    const std::span<const double> all_phi{phi};
    std::vector<CountyEstimate> out;
    std::vector<double> lambda(k);
    for (const DayFit& fit : fits) {
        if (fit.is_skipped()) {
            continue;
        }
        const std::size_t t = fit.day_index;
        if (t >= panel.num_days()) {
            throw IndexError("fit refers to a day outside the panel");
        }
        const auto day_phi = all_phi.subspan(t * k, k);
        compute_lambda_into(day_phi, simd::sum(day_phi), fit.params.p, lambda);
        const auto counts = panel.day(t);
        for (std::size_t c = 0; c < k; ++c) {
            const GammaPosterior law = posterior(fit.params, lambda[c], counts[c]);
            CountyEstimate row;
            row.date = fit.date;
            row.day_index = t;
            row.region_id = panel.region_ids()[c];
            row.posterior_mean = law.mean();
            row.lambda = lambda[c];
            row.cases = counts[c];
            row.quantiles.reserve(config.quantiles.size());
            for (double q : config.quantiles) {
                row.quantiles.push_back(law.quantile(q));
            }
            out.push_back(std::move(row));
        }
    }
    return out;
}

std::vector<DayFit> backdate(std::vector<DayFit> fits, long days)
{
    if (days < 0) {
        throw InvalidConfiguration("backdate days must be nonnegative");
    }
    for (auto& fit : fits) {
        fit.date = fit.date - days;
    }
    return fits;
}

std::vector<CountyEstimate> backdate(std::vector<CountyEstimate> estimates, long days)
{
    if (days < 0) {
        throw InvalidConfiguration("backdate days must be nonnegative");
    }
    for (auto& row : estimates) {
        row.date = row.date - days;
    }
    return estimates;
}

} // namespace sae
