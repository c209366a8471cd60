#pragma once

#include "sae/generation_time.hpp"
#include "sae/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sae::cli
{

enum ExitCode : int
{
    kSuccess = 0,
    kUsageError = 1,
    kIoError = 2,
    kNumericFailure = 3,
};

/// Options of one CLI invocation after merging the config file and the flags.
struct RunConfig
{
    std::string subcommand;
    std::filesystem::path input;
    std::filesystem::path output_dir = ".";
    std::string gen_time = "trapezoid:1,3,4,3";
    long backdate_days = 7;
    double level = 0.95;
    std::vector<double> quantiles{0.05, 0.5, 0.95};
    std::vector<std::string> format;
    std::optional<std::size_t> burn_in;
    unsigned threads = 1;

    // simulate
    std::uint64_t seed = 1;
    int replicates = 1;
    int k = 20;
    double sigma = 0.14;
    std::int64_t initial_cases = 400;
    std::string schedule = "20:2.5,40:0.7,40:1.2";
    std::string start_date = "2020-03-01";
    std::optional<double> county_r_shape;
};

/// Generation time from `trapezoid:START,UP,PLATEAU,DOWN`, `weights:START:w1,w2,...`
/// or a path to a `day,weight` CSV. Throws InvalidConfiguration or ParseError.
GenerationTimePmf parse_generation_time(const std::string& spec);

/// `days:R,days:R,...`
std::vector<SchedulePhase> parse_schedule(const std::string& spec);

/// Column label for a quantile probability: 0.05 -> q05, 0.5 -> q50, 0.025 -> q02.5.
std::string quantile_label(double q);

/// Reads a key=value config file into `--key value` arguments (underscores become dashes,
/// '#' starts a comment).
std::vector<std::string> config_file_arguments(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sae::cli
