#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sae
{

/// Raised when a configuration violates a documented precondition
/// (zero-length pmf, fewer than two regions, bad simulation settings).
class InvalidConfiguration : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// Day or region index outside a panel.
class IndexError : public std::out_of_range
{
public:
    using std::out_of_range::out_of_range;
};

/// Non-finite value encountered where a finite one is required.
class NumericError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string& message, std::size_t line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message)
        , m_line(line)
    {
    }

    std::size_t line() const noexcept { return m_line; }

private:
    std::size_t m_line;
};

} // namespace sae
