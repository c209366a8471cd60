#include "cli.hpp"

#include "sae/errors.hpp"
#include "sae/inference.hpp"
#include "sae/ingest.hpp"
#include "sae/model.hpp"
#include "sae/random.hpp"
#include "sae/simd/kernels.hpp"
#include "sae/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sae::cli
{
namespace
{

namespace fs = std::filesystem;

std::string number(double v)
{
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.10g", v);
    return buffer;
}

double parse_double(std::string_view text, const std::string& what)
{
    const std::string owned{text};
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(owned, &used);
    }
    catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != owned.size()) {
        throw InvalidConfiguration(what + ": '" + owned + "' is not a number");
    }
    return value;
}

int parse_int(std::string_view text, const std::string& what)
{
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InvalidConfiguration(what + ": '" + std::string(text) + "' is not an integer");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    for (;;) {
        const auto end = text.find(sep, begin);
        parts.push_back(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
        if (end == std::string_view::npos) {
            return parts;
        }
        begin = end + 1;
    }
}

std::string_view trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

std::vector<double> parse_quantiles(const std::string& text)
{
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        out.push_back(parse_double(part, "quantile"));
    }
    return out;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out{path};
    if (!out) {
        throw std::ios_base::failure("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void finish(std::ofstream& out, const fs::path& path)
{
    out.flush();
    if (!out) {
        throw std::ios_base::failure("error writing '" + path.string() + "'");
    }
}

void ensure_directory(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::ios_base::failure("cannot create output directory '" + dir.string() + "'");
    }
}

FitConfig fit_config(const RunConfig& run)
{
    FitConfig config;
    config.level = run.level;
    config.quantiles = run.quantiles;
    config.burn_in = run.burn_in;
    config.threads = run.threads;
    config.validate();
    if (run.backdate_days < 0) {
        throw InvalidConfiguration("--backdate-days must be nonnegative");
    }
    return config;
}

SimConfig sim_config(const RunConfig& run)
{
    SimConfig config;
    config.k = run.k;
    config.sigma = run.sigma;
    config.schedule = parse_schedule(run.schedule);
    config.initial_cases = run.initial_cases;
    config.w = parse_generation_time(run.gen_time);
    config.seed = run.seed;
    try {
        config.start_date = Date::parse(run.start_date);
    }
    catch (const std::invalid_argument& e) {
        throw InvalidConfiguration(std::string("--start-date: ") + e.what());
    }
    config.county_r_shape = run.county_r_shape;
    config.validate();
    if (run.replicates < 1) {
        throw InvalidConfiguration("--replicates must be at least 1");
    }
    return config;
}

nlohmann::json pmf_json(const GenerationTimePmf& w, const std::string& spec)
{
    return {{"spec", spec},
            {"support_start", w.support_start()},
            {"weights", std::vector<double>(w.weights().begin(), w.weights().end())},
            {"mean", w.mean()}};
}

void write_simulation(const fs::path& dir, const SimConfig& config, const RunConfig& run, int replicate)
{
    ensure_directory(dir);
    const SimResult result = simulate(config);
    write_panel(dir / "panel.csv", result.panel);

    const fs::path truth_path = dir / "truth.csv";
    auto truth = open_output(truth_path);
    truth << "date,true_r\n";
    for (std::size_t t = 0; t < result.true_r.size(); ++t) {
        truth << result.panel.date(t).to_string() << ',' << number(result.true_r[t]) << '\n';
    }
    finish(truth, truth_path);

    nlohmann::json schedule = nlohmann::json::array();
    for (const auto& phase : config.schedule) {
        schedule.push_back({{"days", phase.days}, {"r", phase.r}});
    }
    nlohmann::json meta{
        {"version", kVersion},
        {"command", "simulate"},
        {"seed", config.seed},
        {"base_seed", run.seed},
        {"replicate", replicate},
        {"replicates", run.replicates},
        {"replicate_seed_rule", "replicates > 1: seed = splitmix64(base_seed + replicate)"},
        {"rng", "std::mt19937_64; Box-Muller normals, inversion/PTRS Poisson, Marsaglia-Tsang gamma"},
        {"k", config.k},
        {"sigma", config.sigma},
        {"initial_cases", config.initial_cases},
        {"schedule", schedule},
        {"start_date", config.start_date.to_string()},
        {"county_r_shape", config.county_r_shape ? nlohmann::json(*config.county_r_shape) : nlohmann::json(nullptr)},
        {"generation_time", pmf_json(config.w, run.gen_time)},
        {"num_regions", result.panel.num_regions()},
        {"num_days", result.panel.num_days()},
        {"seeded_cases", result.seeded},
        {"offspring", result.offspring},
        {"cross_county_fraction", result.cross_county_fraction},
    };
    const fs::path meta_path = dir / "meta.json";
    auto meta_out = open_output(meta_path);
    meta_out << meta.dump(2) << '\n';
    finish(meta_out, meta_path);
}

int cmd_simulate(const RunConfig& run, std::ostream& out)
{
    SimConfig config = sim_config(run);
    ensure_directory(run.output_dir);
    for (int r = 0; r < run.replicates; ++r) {
        fs::path dir = run.output_dir;
        if (run.replicates > 1) {
            char name[32];
            std::snprintf(name, sizeof(name), "rep_%03d", r);
            dir /= name;
            config.seed = random::mix_seed(run.seed + static_cast<std::uint64_t>(r));
        }
        write_simulation(dir, config, run, r);
        out << "wrote " << dir.string() << '\n';
    }
    return kSuccess;
}

LoadedPanel load_input(const RunConfig& run, std::ostream& err)
{
    const FormatOptions format = FormatOptions::from_key_values(run.format);
    if (run.input.empty()) {
        throw InvalidConfiguration("--input is required");
    }
    LoadedPanel loaded = load_panel(run.input, format);
    const auto& report = loaded.report;
    if (report.clamped_cells > 0) {
        err << "warning: " << report.clamped_cells << " cells with negative net counts clamped to zero ("
            << report.clamped_cases << " cases)\n";
    }
    return loaded;
}

int cmd_fit(const RunConfig& run, std::ostream& out, std::ostream& err)
{
    const FitConfig config = fit_config(run);
    const GenerationTimePmf w = parse_generation_time(run.gen_time);
    const LoadedPanel loaded = load_input(run, err);
    const IncidencePanel& panel = loaded.panel;
    if (panel.num_regions() < 2) {
        throw InvalidConfiguration("fit needs at least two regions; use 'naive' for a single series");
    }
    ensure_directory(run.output_dir);

    const auto fits = fit_panel(panel, w, config);
    const auto counties = backdate(county_estimates(panel, w, fits, config), run.backdate_days);
    const auto dated = backdate(fits, run.backdate_days);

    const fs::path country_path = run.output_dir / "country_estimates.csv";
    auto country = open_output(country_path);
    country << "date,a_hat,s_hat,p_hat,r_tilde,ci_lower,ci_upper,converged,skipped_reason\n";
    for (const DayFit& fit : dated) {
        country << fit.date.to_string() << ',';
        if (fit.is_skipped()) {
            country << ",,,,,,," << to_string(fit.skipped) << '\n';
            continue;
        }
        country << number(fit.params.a) << ',' << number(fit.params.s) << ',' << number(fit.params.p) << ','
                << number(fit.r_tilde) << ',';
        if (fit.r_tilde_ci) {
            country << number(fit.r_tilde_ci->lower) << ',' << number(fit.r_tilde_ci->upper);
        }
        else {
            country << ',';
        }
        country << ',' << (fit.params.converged ? "true" : "false") << ",\n";
    }
    finish(country, country_path);

    const fs::path county_path = run.output_dir / "county_estimates.csv";
    auto county = open_output(county_path);
    county << "date,region_id,lambda,cases,post_mean";
    for (double q : config.quantiles) {
        county << ',' << quantile_label(q);
    }
    county << '\n';
    for (const CountyEstimate& row : counties) {
        county << row.date.to_string() << ',' << row.region_id << ',' << number(row.lambda) << ',' << row.cases << ','
               << number(row.posterior_mean);
        for (double v : row.quantiles) {
            county << ',' << number(v);
        }
        county << '\n';
    }
    finish(county, county_path);

    std::size_t fitted = 0;
    for (const auto& fit : fits) {
        fitted += fit.is_skipped() ? 0 : 1;
    }
    out << "fitted " << fitted << " of " << fits.size() << " days over " << panel.num_regions()
        << " regions; wrote " << country_path.string() << " and " << county_path.string() << '\n';
    return kSuccess;
}

int cmd_naive(const RunConfig& run, std::ostream& out, std::ostream& err)
{
    if (run.backdate_days < 0) {
        throw InvalidConfiguration("--backdate-days must be nonnegative");
    }
    const GenerationTimePmf w = parse_generation_time(run.gen_time);
    const LoadedPanel loaded = load_input(run, err);
    const IncidencePanel country = aggregate_country(loaded.panel);
    ensure_directory(run.output_dir);

    const fs::path path = run.output_dir / "naive_estimates.csv";
    auto csv = open_output(path);
    csv << "date,i_t,phi_t,r_hat\n";
    for (std::size_t t = 0; t < country.num_days(); ++t) {
        const double phi = compute_phi(country, w, t)[0];
        const auto r_hat = naive_r_hat(country, w, t);
        csv << (country.date(t) - run.backdate_days).to_string() << ',' << country.at(0, t) << ',' << number(phi)
            << ',';
        if (r_hat) {
            csv << number(*r_hat);
        }
        csv << '\n';
    }
    finish(csv, path);
    out << "wrote " << path.string() << '\n';
    return kSuccess;
}

// Splices `--config FILE` contents in front of the remaining flags so flags take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
    std::vector<std::string> rest;
    std::vector<std::string> from_file;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            const auto extra = config_file_arguments(args[++i]);
            from_file.insert(from_file.end(), extra.begin(), extra.end());
        }
        else if (args[i].starts_with("--config=")) {
            const auto extra = config_file_arguments(args[i].substr(9));
            from_file.insert(from_file.end(), extra.begin(), extra.end());
        }
        else {
            rest.push_back(args[i]);
        }
    }
    std::vector<std::string> merged;
    auto sub = std::find_if(rest.begin(), rest.end(), [](const std::string& a) { return !a.starts_with("-"); });
    if (sub == rest.end()) {
        merged = from_file;
        merged.insert(merged.end(), rest.begin(), rest.end());
        return merged;
    }
    merged.assign(rest.begin(), sub + 1);
    merged.insert(merged.end(), from_file.begin(), from_file.end());
    merged.insert(merged.end(), sub + 1, rest.end());
    return merged;
}

void add_common_options(CLI::App& sub, RunConfig& run)
{
    sub.add_option("--config", "key=value file; command-line flags override its values");
    sub.add_option("--gen-time", run.gen_time,
                   "Generation time: trapezoid:START,UP,PLATEAU,DOWN | weights:START:w1,w2,... | path to day,weight CSV")
        ->capture_default_str();
    sub.add_option("--output-dir", run.output_dir, "Directory for output files")->capture_default_str();
    sub.add_option("--threads", run.threads, "Worker threads for day fits (0 = all cores)")->capture_default_str();
}

} // namespace

GenerationTimePmf parse_generation_time(const std::string& spec)
{
    if (spec.starts_with("trapezoid:")) {
        const auto parts = split(std::string_view(spec).substr(10), ',');
        if (parts.size() != 4) {
            throw InvalidConfiguration("trapezoid generation time needs START,UP,PLATEAU,DOWN");
        }
        return trapezoid_pmf(parse_int(parts[0], "trapezoid"), parse_int(parts[1], "trapezoid"),
                             parse_int(parts[2], "trapezoid"), parse_int(parts[3], "trapezoid"));
    }
    if (spec.starts_with("weights:")) {
        const auto rest = std::string_view(spec).substr(8);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) {
            throw InvalidConfiguration("weights generation time needs START:w1,w2,...");
        }
        std::vector<double> weights;
        for (auto part : split(rest.substr(colon + 1), ',')) {
            weights.push_back(parse_double(part, "generation time weight"));
        }
        return GenerationTimePmf{parse_int(rest.substr(0, colon), "generation time start"), std::move(weights)};
    }
    std::ifstream in{spec};
    if (!in) {
        throw InvalidConfiguration("generation time '" + spec + "' is neither a known form nor a readable file");
    }
    std::vector<std::pair<int, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line, ',');
        if (fields.size() == 1 && fields[0].empty()) {
            continue;
        }
        if (fields.size() != 2) {
            throw ParseError("expected day,weight", line_no);
        }
        if (line_no == 1 && fields[0] == "day") {
            continue;
        }
        try {
            rows.emplace_back(parse_int(fields[0], "day"), parse_double(fields[1], "weight"));
        }
        catch (const InvalidConfiguration& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (rows.empty()) {
        throw ParseError("generation time file has no rows", 0);
    }
    std::sort(rows.begin(), rows.end());
    const int start = rows.front().first;
    std::vector<double> weights(static_cast<std::size_t>(rows.back().first - start + 1), 0.0);
    for (const auto& [day, weight] : rows) {
        weights[static_cast<std::size_t>(day - start)] += weight;
    }
    return GenerationTimePmf{start, std::move(weights)};
}

std::vector<SchedulePhase> parse_schedule(const std::string& spec)
{
    std::vector<SchedulePhase> schedule;
    for (auto part : split(spec, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string_view::npos) {
            throw InvalidConfiguration("schedule entries are days:R");
        }
        schedule.push_back({parse_int(part.substr(0, colon), "schedule days"),
                            parse_double(part.substr(colon + 1), "schedule R")});
    }
    return schedule;
}

std::string quantile_label(double q)
{
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", 100.0 * q);
    std::string label = buffer;
    const auto whole = label.find('.');
    if ((whole == std::string::npos ? label.size() : whole) < 2) {
        label.insert(0, "0");
    }
    return "q" + label;
}

std::vector<std::string> config_file_arguments(const fs::path& path)
{
    std::ifstream in{path};
    if (!in) {
        throw std::ios_base::failure("cannot open config file '" + path.string() + "'");
    }
    std::vector<std::string> args;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config lines must be key=value", line_no);
        }
        std::string key{trim(std::string_view(line).substr(0, eq))};
        std::string value{trim(std::string_view(line).substr(eq + 1))};
        if (key.starts_with("--")) {
            key.erase(0, 2);
        }
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty()) {
            throw ParseError("empty config key", line_no);
        }
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig run;
    std::string quantiles = "0.05,0.5,0.95";
    std::optional<long> burn_in;

    CLI::App app{"Small-area estimation of regional reproduction numbers"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the spatial branching process on the torus");
    simulate_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common_options(*simulate_cmd, run);
    simulate_cmd->add_option("--seed", run.seed, "RNG seed")->capture_default_str();
    simulate_cmd->add_option("--replicates", run.replicates, "Number of replicate runs")->capture_default_str();
    simulate_cmd->add_option("--k", run.k, "Torus side (k^2 counties)")->capture_default_str();
    simulate_cmd->add_option("--sigma", run.sigma, "Dispersal standard deviation")->capture_default_str();
    simulate_cmd->add_option("--initial-cases", run.initial_cases, "Seeded infections")->capture_default_str();
    simulate_cmd->add_option("--schedule", run.schedule, "Reproduction number schedule days:R,...")
        ->capture_default_str();
    simulate_cmd->add_option("--start-date", run.start_date, "Date of the first simulated day")->capture_default_str();
    simulate_cmd->add_option("--county-r-shape", run.county_r_shape,
                             "Draw R_c(t) ~ Gamma(shape, R(t)/shape) per county and day");

    auto* fit_cmd = app.add_subcommand("fit", "Fit the regional model and write country and county estimates");
    auto* naive_cmd = app.add_subcommand("naive", "Country-level ratio estimator I(t) / Phi(t)");
    for (auto* sub : {fit_cmd, naive_cmd}) {
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        add_common_options(*sub, run);
        sub->add_option("--input", run.input, "Long-format case CSV (region_id,date,cases)")->required();
        sub->add_option("--backdate-days", run.backdate_days, "Shift output dates back by this many days")
            ->capture_default_str();
        sub->add_option("--format", run.format, "Column mapping key=value (region_col, date_col, cases_col, delimiter, preset)")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    }
    fit_cmd->add_option("--level", run.level, "Confidence level for r_tilde")->capture_default_str();
    fit_cmd->add_option("--quantiles", quantiles, "Posterior quantile probabilities")->capture_default_str();
    fit_cmd->add_option("--burn-in", burn_in, "Days skipped at the panel start (default: largest generation lag)");

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    try {
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        run.quantiles = parse_quantiles(quantiles);
        if (burn_in) {
            if (*burn_in < 0) {
                throw InvalidConfiguration("--burn-in must be nonnegative");
            }
            run.burn_in = static_cast<std::size_t>(*burn_in);
        }
        if (simulate_cmd->parsed()) {
            run.subcommand = "simulate";
            return cmd_simulate(run, out);
        }
        if (fit_cmd->parsed()) {
            run.subcommand = "fit";
            return cmd_fit(run, out, err);
        }
        run.subcommand = "naive";
        return cmd_naive(run, out, err);
    }
    catch (const InvalidConfiguration& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericFailure;
    }
}

} // namespace sae::cli
