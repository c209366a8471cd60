#include "sae/ingest.hpp"

#include "sae/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

namespace sae
{
namespace
{

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name)
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw ParseError("missing column '" + name + "'", 1);
    }
    return static_cast<std::size_t>(it - header.begin());
}

} // namespace

FormatOptions FormatOptions::rki()
{
    FormatOptions options;
    options.region_column = "IdLandkreis";
    options.date_column = "Meldedatum";
    options.cases_column = "AnzahlFall";
    return options;
}

FormatOptions FormatOptions::from_key_values(const std::vector<std::string>& options)
{
    FormatOptions out;
    for (const auto& option : options) {
        const auto eq = option.find('=');
        if (eq == std::string::npos) {
            throw InvalidConfiguration("format option '" + option + "' is not key=value");
        }
        const std::string key{trim(std::string_view(option).substr(0, eq))};
        const std::string value{trim(std::string_view(option).substr(eq + 1))};
        if (key == "preset") {
            if (value == "rki") {
                const char delimiter = out.delimiter;
                out = rki();
                out.delimiter = delimiter;
            }
            else if (value != "neutral") {
                throw InvalidConfiguration("unknown format preset '" + value + "'");
            }
        }
        else if (key == "region_col") {
            out.region_column = value;
        }
        else if (key == "date_col") {
            out.date_column = value;
        }
        else if (key == "cases_col") {
            out.cases_column = value;
        }
        else if (key == "delimiter") {
            if (value == "tab") {
                out.delimiter = '\t';
            }
            else if (value.size() == 1) {
                out.delimiter = value[0];
            }
            else {
                throw InvalidConfiguration("delimiter must be a single character or 'tab'");
            }
        }
        else {
            throw InvalidConfiguration("unknown format option '" + key + "'");
        }
    }
    return out;
}

std::vector<std::string> split_fields(std::string_view line, char delimiter)
{
    std::vector<std::string> fields;
    std::size_t begin = 0;
    for (;;) {
        const auto end = line.find(delimiter, begin);
        std::string_view field = trim(line.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
            field = field.substr(1, field.size() - 2);
        }
        fields.emplace_back(field);
        if (end == std::string_view::npos) {
            break;
        }
        begin = end + 1;
    }
    return fields;
}

LoadedPanel load_panel(std::istream& in, const FormatOptions& options)
{
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_fields(line, options.delimiter);
            break;
        }
    }
    if (header.empty()) {
        throw ParseError("empty input", 0);
    }
    if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) {
        header[0].erase(0, 3);
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (header[i] == header[j]) {
                throw ParseError("duplicate header column '" + header[i] + "'", line_no);
            }
        }
    }
    const std::size_t region_col = column_index(header, options.region_column);
    const std::size_t date_col = column_index(header, options.date_column);
    const std::size_t cases_col = column_index(header, options.cases_column);
    const std::size_t needed = std::max({region_col, date_col, cases_col}) + 1;

    ValidationReport report;
    std::map<std::pair<std::string, Date>, std::int64_t> cells;
    Date min_date;
    Date max_date;
    bool any = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line, options.delimiter);
        if (fields == header) {
            throw ParseError("duplicate header", line_no);
        }
        if (fields.size() < needed) {
            throw ParseError("expected at least " + std::to_string(needed) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        const std::string& region = fields[region_col];
        if (region.empty()) {
            throw ParseError("empty region id", line_no);
        }
        Date date;
        try {
            date = Date::parse(fields[date_col]);
        }
        catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no);
        }
        std::int64_t cases = 0;
        const std::string& text = fields[cases_col];
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cases);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
            throw ParseError("case count '" + text + "' is not an integer", line_no);
        }
        ++report.rows;
        auto [it, inserted] = cells.try_emplace({region, date}, 0);
        if (!inserted) {
            ++report.merged_rows;
        }
        it->second += cases;
        if (!any || date < min_date) {
            min_date = date;
        }
        if (!any || date > max_date) {
            max_date = date;
        }
        any = true;
    }
    if (!any) {
        throw ParseError("no data rows", line_no);
    }

    std::vector<std::string> regions;
    for (const auto& [key, value] : cells) {
        if (regions.empty() || regions.back() != key.first) {
            regions.push_back(key.first);
        }
    }
    const std::size_t k = regions.size();
    const auto days = static_cast<std::size_t>(max_date - min_date) + 1;
    std::vector<std::int64_t> counts(k * days, 0);
    std::vector<bool> filled(k * days, false);
    std::size_t region_index = 0;
    for (const auto& [key, value] : cells) {
        while (regions[region_index] != key.first) {
            ++region_index;
        }
        const auto t = static_cast<std::size_t>(key.second - min_date);
        std::int64_t cell = value;
        if (cell < 0) {
            ++report.clamped_cells;
            report.clamped_cases += -cell;
            cell = 0;
        }
        counts[t * k + region_index] = cell;
        filled[t * k + region_index] = true;
    }
    report.zero_filled_cells = static_cast<std::size_t>(std::count(filled.begin(), filled.end(), false));
    return LoadedPanel{IncidencePanel{std::move(regions), min_date, days, std::move(counts)}, report};
}

LoadedPanel load_panel(const std::filesystem::path& path, const FormatOptions& options)
{
    std::ifstream in{path};
    if (!in) {
        throw std::ios_base::failure("cannot open '" + path.string() + "' for reading");
    }
    return load_panel(in, options);
}

void write_panel(std::ostream& out, const IncidencePanel& panel)
{
    out << "region_id,date,cases\n";
    std::vector<std::string> dates(panel.num_days());
    for (std::size_t t = 0; t < panel.num_days(); ++t) {
        dates[t] = panel.date(t).to_string();
    }
    for (std::size_t c = 0; c < panel.num_regions(); ++c) {
        const std::string& id = panel.region_ids()[c];
        for (std::size_t t = 0; t < panel.num_days(); ++t) {
            out << id << ',' << dates[t] << ',' << panel.at(c, t) << '\n';
        }
    }
}

void write_panel(const std::filesystem::path& path, const IncidencePanel& panel)
{
    std::ofstream out{path};
    if (!out) {
        throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
    }
    write_panel(out, panel);
    if (!out) {
        throw std::ios_base::failure("error writing '" + path.string() + "'");
    }
}

IncidencePanel aggregate_country(const IncidencePanel& panel)
{
    std::vector<std::int64_t> totals(panel.num_days(), 0);
    for (std::size_t t = 0; t < panel.num_days(); ++t) {
        for (auto v : panel.day(t)) {
            totals[t] += v;
        }
    }
    return IncidencePanel{{"ALL"}, panel.start_date(), panel.num_days(), std::move(totals)};
}

} // namespace sae
