#include "wss/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "wss/error.hpp"

namespace wss {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
    throw ConfigError("config field '" + std::string(key) + "': cannot parse '" +
                      std::string(value) + "' as " + std::string(what));
}

double parse_double(std::string_view key, std::string_view value) {
    value = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
        bad_value(key, value, "a finite number");
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
    value = trim(value);
    Int out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        bad_value(key, value, "an integer");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    const std::string v = lower(trim(value));
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    bad_value(key, value, "a boolean");
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> out;
    value = trim(value);
    if (value.empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto comma = value.find_first_of(", ", start);
        const auto item = trim(value.substr(start, comma - start));
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view key, std::string_view value) {
    std::vector<double> out;
    for (auto item : split_list(value)) {
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += format_double(values[i]);
    }
    return out;
}

std::vector<double> cycle_to(const std::vector<double>& values, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i) % values.size()];
    }
    return out;
}

std::string canonical_key(std::string_view key) {
    const std::string k = lower(trim(key));
    if (k == "n") {
        return "n_bands";
    }
    if (k == "k") {
        return "k_branches";
    }
    if (k == "t") {
        return "horizon";
    }
    if (k == "snr") {
        return "snr_db";
    }
    if (k == "l" || k == "exploration_coefficient") {
        return "l";
    }
    if (k == "lambda") {
        return "lambda_mixing";
    }
    if (k == "d") {
        return "fbmp_breadth";
    }
    return k;
}

} // namespace

std::string_view to_string(RsMode mode) {
    return mode == RsMode::Oracle ? "oracle" : "signal";
}

std::vector<double> case_stationary_vacancy(std::string_view case_name) {
    const std::string name = lower(case_name);
    if (name == "case1") {
        return {0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
    }
    if (name == "case2") {
        return {0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.80, 0.90};
    }
    throw ConfigError("config field 'case': unknown case '" + std::string(case_name) +
                      "' (expected case1, case2 or custom)");
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        throw std::runtime_error("failed to format number");
    }
    return std::string(buf, ptr);
}

void apply_setting(ExperimentConfig& c, std::string_view raw_key, std::string_view raw_value) {
    const std::string key = canonical_key(raw_key);
    const std::string_view value = trim(raw_value);
    if (key == "name") {
        if (value.empty() || value.find_first_of("/\\") != std::string_view::npos) {
            throw ConfigError("config field 'name' must be a nonempty file stem");
        }
        c.name = std::string(value);
    } else if (key == "n_bands") {
        c.n_bands = parse_int<int>(key, value);
    } else if (key == "k_branches") {
        c.k_branches = parse_int<int>(key, value);
    } else if (key == "horizon") {
        c.horizon = parse_int<std::int64_t>(key, value);
    } else if (key == "replications") {
        c.replications = parse_int<int>(key, value);
    } else if (key == "seed") {
        c.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "case") {
        c.case_name = lower(value);
    } else if (key == "p0") {
        c.p0 = parse_double_list(key, value);
    } else if (key == "p01") {
        c.p01 = parse_double_list(key, value);
    } else if (key == "p10") {
        c.p10 = parse_double_list(key, value);
    } else if (key == "lambda_mixing") {
        c.lambda_mixing = parse_double(key, value);
    } else if (key == "snr_db") {
        const std::string v = lower(value);
        if (v == "noiseless" || v == "inf" || v == "none") {
            c.snr_db.reset();
        } else {
            c.snr_db = parse_double(key, value);
        }
    } else if (key == "rs_mode") {
        const std::string v = lower(value);
        if (v == "oracle") {
            c.rs_mode = RsMode::Oracle;
        } else if (v == "signal") {
            c.rs_mode = RsMode::Signal;
        } else {
            bad_value(key, value, "oracle or signal");
        }
    } else if (key == "policies") {
        c.policies.clear();
        for (auto item : split_list(value)) {
            c.policies.push_back(parse_policy_mode(item));
        }
    } else if (key == "l") {
        c.exploration_coefficient = parse_double("L", value);
    } else if (key == "mu") {
        c.mu = parse_double(key, value);
    } else if (key == "delta") {
        c.delta = parse_double(key, value);
    } else if (key == "bins_per_band") {
        c.bins_per_band = parse_int<int>(key, value);
    } else if (key == "signal_power") {
        c.signal_power = parse_double(key, value);
    } else if (key == "energy_fa_rate") {
        c.energy_fa_rate = parse_double(key, value);
    } else if (key == "fbmp_breadth") {
        c.fbmp_breadth = parse_int<int>(key, value);
    } else if (key == "residual_threshold") {
        c.residual_threshold = parse_double(key, value);
    } else if (key == "redraw_matrix_per_slot") {
        c.redraw_matrix_per_slot = parse_bool(key, value);
    } else if (key == "workers") {
        c.workers = parse_int<int>(key, value);
    } else {
        throw ConfigError("unknown config field '" + std::string(raw_key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& in, const ExperimentConfig& base) {
    ExperimentConfig config = base;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string format_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "name = " << c.name << '\n'
        << "n_bands = " << c.n_bands << '\n'
        << "k_branches = " << c.k_branches << '\n'
        << "horizon = " << c.horizon << '\n'
        << "replications = " << c.replications << '\n'
        << "seed = " << c.seed << '\n'
        << "case = " << c.case_name << '\n'
        << "p0 = " << join(c.p0) << '\n'
        << "p01 = " << join(c.p01) << '\n'
        << "p10 = " << join(c.p10) << '\n'
        << "lambda_mixing = " << format_double(c.lambda_mixing) << '\n'
        << "snr_db = " << (c.snr_db ? format_double(*c.snr_db) : std::string("noiseless")) << '\n'
        << "rs_mode = " << to_string(c.rs_mode) << '\n'
        << "policies = ";
    for (std::size_t i = 0; i < c.policies.size(); ++i) {
        out << (i > 0 ? ", " : "") << to_string(c.policies[i]);
    }
    out << '\n'
        << "L = " << format_double(c.exploration_coefficient) << '\n'
        << "mu = " << format_double(c.mu) << '\n'
        << "delta = " << format_double(c.delta) << '\n'
        << "bins_per_band = " << c.bins_per_band << '\n'
        << "signal_power = " << format_double(c.signal_power) << '\n'
        << "energy_fa_rate = " << format_double(c.energy_fa_rate) << '\n'
        << "fbmp_breadth = " << c.fbmp_breadth << '\n'
        << "residual_threshold = " << format_double(c.residual_threshold) << '\n'
        << "redraw_matrix_per_slot = " << (c.redraw_matrix_per_slot ? "true" : "false") << '\n'
        << "workers = " << c.workers << '\n';
    return out.str();
}

BandStatistics resolve_statistics(const ExperimentConfig& c) {
    if (!c.p01.empty() || !c.p10.empty()) {
        if (c.p01.empty() || c.p10.empty()) {
            throw ConfigError("config fields 'p01' and 'p10' must be given together");
        }
        if (c.p01.size() != c.p10.size()) {
            throw ConfigError("config fields 'p01' and 'p10' differ in length");
        }
        return BandStatistics(cycle_to(c.p01, c.n_bands), cycle_to(c.p10, c.n_bands));
    }
    if (!c.p0.empty()) {
        return BandStatistics::from_stationary(cycle_to(c.p0, c.n_bands), c.lambda_mixing);
    }
    if (c.case_name == "custom") {
        throw ConfigError("config field 'case' is custom but no p0 or p01/p10 vectors are given");
    }
    return BandStatistics::from_stationary(cycle_to(case_stationary_vacancy(c.case_name), c.n_bands),
                                           c.lambda_mixing);
}

void validate(const ExperimentConfig& c) {
    auto require = [](bool ok, const std::string& field, const std::string& rule) {
        if (!ok) {
            throw ConfigError("config field '" + field + "' " + rule);
        }
    };
    require(c.n_bands >= 1, "n_bands", "must be at least 1");
    require(c.k_branches >= 1 && c.k_branches <= c.n_bands, "k_branches",
            "must satisfy 1 <= K <= N (K=" + std::to_string(c.k_branches) +
                ", N=" + std::to_string(c.n_bands) + ")");
    require(c.horizon >= 0, "horizon", "must be nonnegative");
    require(c.replications >= 1, "replications", "must be at least 1");
    require(!c.policies.empty(), "policies", "must name at least one policy");
    for (std::size_t i = 0; i < c.policies.size(); ++i) {
        require(std::count(c.policies.begin(), c.policies.end(), c.policies[i]) == 1, "policies",
                "lists " + std::string(to_string(c.policies[i])) + " more than once");
    }
    require(c.exploration_coefficient > 0.0, "L", "must be positive");
    require(c.mu > 0.0 && c.mu < 1.0, "mu", "must lie in (0, 1)");
    require(c.delta > 0.0 && c.delta < 1.0, "delta", "must lie in (0, 1)");
    require(c.lambda_mixing > 0.0 && c.lambda_mixing <= 1.0, "lambda_mixing", "must lie in (0, 1]");
    require(c.bins_per_band >= 1, "bins_per_band", "must be at least 1");
    require(c.signal_power > 0.0, "signal_power", "must be positive");
    require(c.energy_fa_rate > 0.0 && c.energy_fa_rate < 1.0, "energy_fa_rate", "must lie in (0, 1)");
    require(c.fbmp_breadth >= 1, "fbmp_breadth", "must be at least 1");
    require(c.residual_threshold > 0.0, "residual_threshold", "must be positive");
    require(c.workers >= 0, "workers", "must be nonnegative");
    require(c.rs_mode == RsMode::Oracle || c.n_bands <= 64, "n_bands",
            "must be at most 64 in signal mode");
    resolve_statistics(c);
}

} // namespace wss
