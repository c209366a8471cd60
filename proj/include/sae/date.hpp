#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace sae
{

/// Calendar day. Thin wrapper over std::chrono::sys_days with ISO-8601 text conversion.
class Date
{
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days day)
        : m_day(day)
    {
    }
    Date(int year, unsigned month, unsigned day);

    /// Parses `YYYY-MM-DD`. `YYYY/MM/DD` is accepted too, and anything after
    /// the tenth character that starts with a space or 'T' (a time of day) is ignored.
    /// Throws std::invalid_argument on malformed or impossible dates.
    static Date parse(std::string_view text);

    std::string to_string() const;

    constexpr std::chrono::sys_days sys_days() const { return m_day; }

    constexpr Date operator+(long offset) const { return Date{m_day + std::chrono::days{offset}}; }
    constexpr Date operator-(long offset) const { return Date{m_day - std::chrono::days{offset}}; }
    constexpr long operator-(const Date& other) const { return (m_day - other.m_day).count(); }

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days m_day{};
};

} // namespace sae
