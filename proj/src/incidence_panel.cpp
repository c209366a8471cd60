#include "sae/incidence_panel.hpp"

#include "sae/errors.hpp"

#include <numeric>
#include <unordered_set>

namespace sae
{

IncidencePanel::IncidencePanel(std::vector<std::string> region_ids, Date start, std::size_t num_days,
                               std::vector<std::int64_t> counts)
    : m_region_ids(std::move(region_ids))
    , m_start(start)
    , m_num_days(num_days)
    , m_counts(std::move(counts))
{
    if (m_region_ids.empty() || m_num_days == 0) {
        throw InvalidConfiguration("incidence panel needs at least one region and one day");
    }
    if (m_counts.size() != m_region_ids.size() * m_num_days) {
        throw InvalidConfiguration("incidence panel count matrix has wrong size");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : m_region_ids) {
        if (!seen.insert(id).second) {
            throw InvalidConfiguration("duplicate region id '" + id + "'");
        }
    }
    for (auto count : m_counts) {
        if (count < 0) {
            throw InvalidConfiguration("incidence counts must be nonnegative");
        }
    }
}

Date IncidencePanel::date(std::size_t t) const
{
    if (t >= m_num_days) {
        throw IndexError("day index " + std::to_string(t) + " outside panel");
    }
    return m_start + static_cast<long>(t);
}

std::int64_t IncidencePanel::at(std::size_t region, std::size_t t) const
{
    if (region >= num_regions() || t >= m_num_days) {
        throw IndexError("panel index out of range");
    }
    return m_counts[t * num_regions() + region];
}

std::span<const std::int64_t> IncidencePanel::day(std::size_t t) const
{
    if (t >= m_num_days) {
        throw IndexError("day index " + std::to_string(t) + " outside panel");
    }
    return std::span<const std::int64_t>(m_counts).subspan(t * num_regions(), num_regions());
}

std::vector<std::int64_t> IncidencePanel::series(std::size_t region) const
{
    if (region >= num_regions()) {
        throw IndexError("region index out of range");
    }
    std::vector<std::int64_t> out(m_num_days);
    for (std::size_t t = 0; t < m_num_days; ++t) {
        out[t] = m_counts[t * num_regions() + region];
    }
    return out;
}

std::int64_t IncidencePanel::total() const
{
    return std::accumulate(m_counts.begin(), m_counts.end(), std::int64_t{0});
}

IncidencePanel IncidencePanel::permuted(std::span<const std::size_t> order) const
{
    const std::size_t k = num_regions();
    if (order.size() != k) {
        throw InvalidConfiguration("permutation has wrong length");
    }
    std::vector<std::string> ids(k);
    std::vector<std::int64_t> counts(m_counts.size());
    for (std::size_t i = 0; i < k; ++i) {
        if (order[i] >= k) {
            throw IndexError("permutation index out of range");
        }
        ids[i] = m_region_ids[order[i]];
        for (std::size_t t = 0; t < m_num_days; ++t) {
            counts[t * k + i] = m_counts[t * k + order[i]];
        }
    }
    return IncidencePanel{std::move(ids), m_start, m_num_days, std::move(counts)};
}

} // namespace sae
