#pragma once

#include "sae/date.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sae
{

/// K regions by T consecutive days of nonnegative case counts I_c(t).
///
/// Counts are stored day-major: the K counts of one day are contiguous, which is
/// the layout the convolution kernels consume.
class IncidencePanel
{
public:
    /// `counts` is day-major with size region_ids.size() * num_days.
    /// Throws InvalidConfiguration on duplicate ids, negative counts, a size mismatch,
    /// zero days or zero regions.
    IncidencePanel(std::vector<std::string> region_ids, Date start, std::size_t num_days,
                   std::vector<std::int64_t> counts);

    std::size_t num_regions() const { return m_region_ids.size(); }
    std::size_t num_days() const { return m_num_days; }

    const std::vector<std::string>& region_ids() const { return m_region_ids; }
    Date start_date() const { return m_start; }
    Date date(std::size_t t) const;

    /// I_c(t). Throws IndexError when out of range.
    std::int64_t at(std::size_t region, std::size_t t) const;

    /// All K counts on day t.
    std::span<const std::int64_t> day(std::size_t t) const;

    std::span<const std::int64_t> counts() const { return m_counts; }

    /// Counts of one region over all days.
    std::vector<std::int64_t> series(std::size_t region) const;

    std::int64_t total() const;

    /// Same data with regions reordered: region i of the result is region order[i] of this panel.
    IncidencePanel permuted(std::span<const std::size_t> order) const;

private:
    std::vector<std::string> m_region_ids;
    Date m_start;
    std::size_t m_num_days;
    std::vector<std::int64_t> m_counts;
};

} // namespace sae
