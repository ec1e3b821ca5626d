#pragma once

#include "srf/eve.hpp"
#include "srf/scaling.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srf {

/// Bad flags, config files or values; the CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string protocol = "optimal";  // separable, planar, optimal, bb84, ekert
    int n = 16;                        // N spins, or n per axis for separable/planar
    std::int64_t trials = 1000;
    std::int64_t rounds = 400;         // bb84 rounds M, or ekert CHSH rounds
    EveModel eve;
    double k_sigma = 5.0;
    double threshold = 0.05;
    std::uint64_t seed = 1;
    std::string out;                   // empty: standard output
    std::string format = "csv";
    int jobs = 0;
    bool randomized = true;
    bool timing = false;
    std::string transcript;            // bb84: per-round CSV of the first run
    std::vector<int> n_list;           // sweep only
};

/// One configuration value and where it came from, for diagnostics.
struct Setting {
    std::string value;
    std::string origin;
};

using Settings = std::map<std::string, Setting>;

/// Flat "key = value" text, '#' starts a comment. Keys may use '-' or '_'.
/// Throws ConfigError naming the line for malformed lines, unknown or repeated keys.
Settings parse_config_text(const std::string& text, const std::string& source);
Settings read_config_file(const std::string& path);

/// Defaults for the protocol, then `settings` on top. Validates every value.
ExperimentConfig make_config(const std::string& protocol, const Settings& settings);

struct RunResult {
    std::string protocol;
    int n = 0;
    std::int64_t trials = 0;
    std::int64_t rounds = 0;
    std::string eve = "none";
    double rms_error = 0.0;
    double rms_stderr = 0.0;
    double detection_rate = 0.0;
    double alarm_statistic_mean = 0.0;
    double alarm_statistic_max = 0.0;
    std::string secret_count = "0";   // decimal, sum_j (2j+1)^2
    int secret_bits = 0;              // ceil(log2 secret_count)
    int secret_product_bits = 0;
    std::uint64_t master_seed = 0;
    std::string code_version;
    std::optional<double> wall_time;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

RunResult execute(const ExperimentConfig& config);

std::string format_double(double value);
std::string to_csv(const RunResult& result);
std::string to_json(const RunResult& result);
RunResult run_result_from_json(const std::string& text);
RunResult run_result_from_csv(const std::string& text);

struct SweepRow {
    int n = 0;
    std::int64_t trials = 0;
    double rms_error = 0.0;
    double rms_stderr = 0.0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::string protocol;
    std::vector<SweepRow> rows;
    ScalingFit fit;
};

/// Runs config.protocol at every entry of config.n_list (rounds M for bb84).
SweepResult run_sweep(const ExperimentConfig& config);
std::string to_csv(const SweepResult& sweep);
std::string to_json(const SweepResult& sweep);

/// Quick oracle and invariant checks, one line per suite. True when all pass.
bool run_selftest(std::ostream& out);

/// Full command line. Returns 0 on success, 1 on usage or config errors,
/// 2 when selftest fails.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_command(int argc, char** argv);

}  // namespace srf
