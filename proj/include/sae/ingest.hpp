#pragma once

#include "sae/incidence_panel.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sae
{

/// Column mapping for long-format case files.
struct FormatOptions
{
    std::string region_column = "region_id";
    std::string date_column = "date";
    std::string cases_column = "cases";
    char delimiter = ',';

    /// Robert Koch-Institut line list columns (IdLandkreis, Meldedatum, AnzahlFall).
    static FormatOptions rki();

    /// Applies `key=value` options: region_col, date_col, cases_col, delimiter
    /// (a single character, or "tab"), preset (neutral | rki).
    /// Throws InvalidConfiguration on unknown keys or malformed values.
    static FormatOptions from_key_values(const std::vector<std::string>& options);
};

struct ValidationReport
{
    std::size_t rows = 0;
    /// Rows that hit an already seen (region, date) cell and were summed into it.
    std::size_t merged_rows = 0;
    /// Cells whose net count was negative and was clamped to zero.
    std::size_t clamped_cells = 0;
    std::int64_t clamped_cases = 0;
    /// Cells with no input rows, filled with zero.
    std::size_t zero_filled_cells = 0;
};

struct LoadedPanel
{
    IncidencePanel panel;
    ValidationReport report;
};

/// Reads long-format rows, sums duplicate (region, date) cells, clamps negative net counts
/// to zero, zero-fills missing cells over the contiguous range [min date, max date] and
/// sorts regions by id. Throws ParseError (with the line number) on malformed input.
LoadedPanel load_panel(std::istream& in, const FormatOptions& options = {});
LoadedPanel load_panel(const std::filesystem::path& path, const FormatOptions& options = {});

/// Canonical long form: header `region_id,date,cases`, rows ordered by region then date,
/// zero cells included.
void write_panel(std::ostream& out, const IncidencePanel& panel);
void write_panel(const std::filesystem::path& path, const IncidencePanel& panel);

/// Per-day sums over regions as a one-region panel with id "ALL".
IncidencePanel aggregate_country(const IncidencePanel& panel);

/// Splits one delimited line. Surrounding double quotes are removed from each field.
std::vector<std::string> split_fields(std::string_view line, char delimiter);

} // namespace sae
