#include "sae/simulator.hpp"

#include "sae/errors.hpp"
#include "sae/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sae
{

void SimConfig::validate() const
{
    if (k < 2) {
        throw InvalidConfiguration("torus side k must be at least 2");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidConfiguration("dispersal sigma must be positive");
    }
    if (schedule.empty()) {
        throw InvalidConfiguration("reproduction number schedule is empty");
    }
    for (const auto& phase : schedule) {
        if (phase.days < 1) {
            throw InvalidConfiguration("schedule durations must be at least one day");
        }
        if (!(phase.r >= 0.0) || !std::isfinite(phase.r)) {
            throw InvalidConfiguration("schedule reproduction numbers must be nonnegative");
        }
    }
    if (initial_cases < 1) {
        throw InvalidConfiguration("at least one initial case is required");
    }
    if (county_r_shape && !(*county_r_shape > 0.0)) {
        throw InvalidConfiguration("county reproduction number shape must be positive");
    }
}

int SimConfig::num_days() const
{
    int total = 0;
    for (const auto& phase : schedule) {
        total += phase.days;
    }
    return total;
}

double SimConfig::r_at(int t) const
{
    int end = 0;
    for (const auto& phase : schedule) {
        end += phase.days;
        if (t < end) {
            return phase.r;
        }
    }
    throw IndexError("day outside the schedule");
}

std::string county_id(int k, int index)
{
    int width = 3;
    for (int n = k * k - 1; n >= 1000; n /= 10) {
        ++width;
    }
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "c%0*d", width, index);
    return buffer;
}

double wrap_torus(double v, double k)
{
    double out = std::fmod(v, k);
    if (out < 0.0) {
        out += k;
    }
    if (out >= k) {
        out = 0.0;
    }
    return out;
}

namespace
{

int county_of(double x, double y, int k)
{
    const int col = std::min(static_cast<int>(x), k - 1);
    const int row = std::min(static_cast<int>(y), k - 1);
    return row * k + col;
}

} // namespace

SimResult simulate(const SimConfig& config)
{
    config.validate();
    const int k = config.k;
    const double side = k;
    const int num_regions = k * k;
    const int days = config.num_days();
    const GenerationTimePmf& w = config.w;
    const int first_lag = w.support_start();
    const int last_lag = w.support_end();

    random::Engine rng{config.seed};

    std::vector<Infection> people;
    people.reserve(static_cast<std::size_t>(config.initial_cases) * 8);
    for (std::int64_t i = 0; i < config.initial_cases; ++i) {
        Infection seed;
        seed.x = side * random::uniform01(rng);
        seed.y = side * random::uniform01(rng);
        const auto offset = static_cast<int>(random::uniform01(rng) * static_cast<double>(w.size()));
        seed.infection_day = -(first_lag + offset);
        seed.county = county_of(seed.x, seed.y, k);
        people.push_back(seed);
    }
    std::stable_sort(people.begin(), people.end(),
                     [](const Infection& l, const Infection& r) { return l.infection_day < r.infection_day; });

    std::vector<std::int64_t> counts(static_cast<std::size_t>(num_regions) * static_cast<std::size_t>(days), 0);
    std::vector<double> true_r(static_cast<std::size_t>(days));
    std::vector<double> county_r(static_cast<std::size_t>(num_regions));
    std::int64_t offspring_total = 0;
    std::int64_t crossed = 0;

    auto by_day = [](const Infection& person, int day) { return person.infection_day < day; };
    for (int t = 0; t < days; ++t) {
        const double r = config.r_at(t);
        true_r[static_cast<std::size_t>(t)] = r;
        if (config.county_r_shape) {
            const double shape = *config.county_r_shape;
            for (double& rc : county_r) {
                rc = r > 0.0 ? random::gamma(rng, shape, r / shape) : 0.0;
            }
        }
        // active: infection_day in [t - last_lag, t - first_lag]
        const auto lo = static_cast<std::size_t>(
            std::lower_bound(people.begin(), people.end(), t - last_lag, by_day) - people.begin());
        const auto hi = static_cast<std::size_t>(
            std::lower_bound(people.begin(), people.end(), t - first_lag + 1, by_day) - people.begin());
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const Infection parent = people[idx];
            const double rc = config.county_r_shape ? county_r[static_cast<std::size_t>(parent.county)] : r;
            const double mean = rc * w(t - parent.infection_day);
            const std::int64_t children = random::poisson(rng, mean);
            for (std::int64_t j = 0; j < children; ++j) {
                const auto [dx, dy] = random::normal_pair(rng);
                Infection child;
                child.x = wrap_torus(parent.x + config.sigma * dx, side);
                child.y = wrap_torus(parent.y + config.sigma * dy, side);
                child.infection_day = t;
                child.county = county_of(child.x, child.y, k);
                if (child.county != parent.county) {
                    ++crossed;
                }
                ++counts[static_cast<std::size_t>(t) * static_cast<std::size_t>(num_regions) +
                         static_cast<std::size_t>(child.county)];
                people.push_back(child);
            }
            offspring_total += children;
        }
    }

    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(num_regions));
    for (int c = 0; c < num_regions; ++c) {
        ids.push_back(county_id(k, c));
    }
    SimResult result{IncidencePanel{std::move(ids), config.start_date, static_cast<std::size_t>(days), std::move(counts)},
                     std::move(true_r),
                     offspring_total > 0 ? static_cast<double>(crossed) / static_cast<double>(offspring_total) : 0.0,
                     config.initial_cases,
                     offspring_total};
    return result;
}

double cross_county_fraction(double sigma, std::int64_t samples, std::uint64_t seed, int k)
{
    if (!(sigma > 0.0) || samples < 1 || k < 2) {
        throw DomainError("cross_county_fraction: need sigma > 0, samples >= 1, k >= 2");
    }
    const double side = k;
    random::Engine rng{seed};
    std::int64_t exits = 0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const double x = random::uniform01(rng);
        const double y = random::uniform01(rng);
        const auto [dx, dy] = random::normal_pair(rng);
        const double nx = wrap_torus(x + sigma * dx, side);
        const double ny = wrap_torus(y + sigma * dy, side);
        if (nx >= 1.0 || ny >= 1.0) {
            ++exits;
        }
    }
    return static_cast<double>(exits) / static_cast<double>(samples);
}

double calibrate_sigma(double target_fraction, double tol, std::uint64_t seed, std::int64_t samples, int k)
{
    if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
        throw DomainError("calibrate_sigma: target must lie in (0, 1)");
    }
    if (!(tol > 0.0)) {
        throw DomainError("calibrate_sigma: tolerance must be positive");
    }
    double lo = 0.0;
    double hi = 1.0;
    while (cross_county_fraction(hi, samples, seed, k) < target_fraction) {
        lo = hi;
        hi *= 2.0;
        if (hi > static_cast<double>(k)) {
            throw InvalidConfiguration("calibrate_sigma: target fraction unreachable on this torus");
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (cross_county_fraction(mid, samples, seed, k) < target_fraction) {
            lo = mid;
        }
        else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace sae
