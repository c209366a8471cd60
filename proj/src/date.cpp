#include "sae/date.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace sae
{

Date::Date(int year, unsigned month, unsigned day)
{
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date");
    }
    m_day = std::chrono::sys_days{ymd};
}

namespace
{
unsigned parse_digits(std::string_view text, std::string_view whole)
{
    unsigned value = 0;
    for (char ch : text) {
        if (ch < '0' || ch > '9') {
            throw std::invalid_argument("malformed date '" + std::string(whole) + "'");
        }
        value = value * 10 + static_cast<unsigned>(ch - '0');
    }
    return value;
}
} // namespace

Date Date::parse(std::string_view text)
{
    if (text.size() < 10) {
        throw std::invalid_argument("malformed date '" + std::string(text) + "'");
    }
    const char sep = text[4];
    if ((sep != '-' && sep != '/') || text[7] != sep) {
        throw std::invalid_argument("malformed date '" + std::string(text) + "'");
    }
    if (text.size() > 10 && text[10] != ' ' && text[10] != 'T') {
        throw std::invalid_argument("malformed date '" + std::string(text) + "'");
    }
    const unsigned year = parse_digits(text.substr(0, 4), text);
    const unsigned month = parse_digits(text.substr(5, 2), text);
    const unsigned day = parse_digits(text.substr(8, 2), text);
    try {
        return Date{static_cast<int>(year), month, day};
    }
    catch (const std::invalid_argument&) {
        throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
    }
}

std::string Date::to_string() const
{
    const std::chrono::year_month_day ymd{m_day};
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

} // namespace sae
