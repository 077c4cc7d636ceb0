#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wss/policy.hpp"
#include "wss/spectrum_model.hpp"

namespace wss {

enum class RsMode { Oracle, Signal };

std::string_view to_string(RsMode mode);

/// Stationary vacancy vectors of the two shipped spectrum cases.
std::vector<double> case_stationary_vacancy(std::string_view case_name);

/// Declarative description of one experiment. Serialized as a flat
/// `key = value` file; see format_config for the key names.
struct ExperimentConfig {
    std::string name = "experiment";
    int n_bands = 8;
    int k_branches = 4;
    std::int64_t horizon = 10000;
    int replications = 100;
    std::uint64_t seed = 1;

    // Statistics: a named case ("case1", "case2"), an explicit stationary
    // vector `p0`, or explicit `p01`/`p10` transition vectors. Named cases and
    // p0 vectors are repeated cyclically when n_bands exceeds their length.
    std::string case_name = "case1";
    std::vector<double> p0;
    std::vector<double> p01;
    std::vector<double> p10;
    double lambda_mixing = 0.5;

    std::optional<double> snr_db; ///< empty = noiseless
    RsMode rs_mode = RsMode::Oracle;
    std::vector<PolicyMode> policies{PolicyMode::LDM, PolicyMode::OLDM, PolicyMode::IMP};

    double exploration_coefficient = 10.0; ///< L
    double mu = 0.45;
    double delta = 0.1;

    int bins_per_band = 64;
    double signal_power = 1.0;
    double energy_fa_rate = 0.05;
    int fbmp_breadth = 5;
    double residual_threshold = 0.1;
    bool redraw_matrix_per_slot = false;

    int workers = 0; ///< 0 = hardware concurrency; never affects results
};

/// Throws ConfigError naming the offending field.
void validate(const ExperimentConfig& config);

/// Ground-truth statistics the config describes, sized to n_bands.
BandStatistics resolve_statistics(const ExperimentConfig& config);

/// Set one field from its textual form. Throws ConfigError on unknown keys
/// or unparsable values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Parse `key = value` lines; `#` starts a comment, blank lines are ignored.
ExperimentConfig parse_config(std::istream& in, const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every field, one per line, with round-trip precision. Parsing the result
/// reproduces the config exactly.
std::string format_config(const ExperimentConfig& config);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

} // namespace wss
