// Command-line driver: run, sweep and validate experiments, and evaluate the
// exploration threshold.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wss/config.hpp"
#include "wss/error.hpp"
#include "wss/experiment.hpp"
#include "wss/results_io.hpp"
#include "wss/selection_optimizer.hpp"

namespace {

constexpr const char* kOutputEnv = "WSS_OUTPUT_DIR";

std::filesystem::path output_dir(const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return "results";
}

void apply_overrides(wss::ExperimentConfig& config, const std::vector<std::string>& settings) {
    for (const auto& s : settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw wss::ConfigError("--set expects key=value, got '" + s + "'");
        }
        wss::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
}

void print_summary(const wss::ExperimentConfig& config, const wss::MetricSeries& series) {
    const auto tail_start = static_cast<std::size_t>(series.horizon * 4 / 5);
    std::cout << config.name << ": N=" << config.n_bands << " K=" << config.k_branches
              << " T=" << config.horizon << " replications=" << config.replications << '\n';
    for (const auto& p : series.policies) {
        double tail = 0.0;
        for (std::size_t t = tail_start; t < p.mean_throughput.size(); ++t) {
            tail += p.mean_throughput[t];
        }
        const auto tail_len = p.mean_throughput.size() - tail_start;
        std::cout << "  " << std::left << std::setw(5) << wss::to_string(p.mode)
                  << " final mean regret " << std::setw(12)
                  << (p.mean_regret.empty() ? 0.0 : p.mean_regret.back())
                  << " tail mean throughput " << (tail_len > 0 ? tail / tail_len : 0.0) << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-contiguous wideband spectrum sensing simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::vector<std::string> settings;

    auto* run = app.add_subcommand("run", "Run one experiment and write its CSV and manifest");
    run->add_option("config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    run->add_option("--set", settings, "Override a config field (key=value), repeatable");
    run->add_option("--out", out_flag, std::string("Output directory (default $") + kOutputEnv + " or ./results)");

    std::string sweep_config;
    std::string sweep_param;
    std::vector<std::string> sweep_values;
    auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over values of K, N, SNR or L");
    sweep->add_option("config", sweep_config, "Base config file (defaults to built-in case 1)")
        ->check(CLI::ExistingFile);
    sweep->add_option("--param", sweep_param, "Parameter to vary: K, N, SNR or L")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required()->delimiter(',');
    sweep->add_option("--set", settings, "Override a config field (key=value), repeatable");
    sweep->add_option("--out", out_flag, "Output directory");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config file without running it");
    validate->add_option("config", validate_path, "Experiment config file")->required();
    validate->add_option("--set", settings, "Override a config field (key=value), repeatable");

    int n_bands = 8;
    int k_branches = 4;
    double mu = 0.05;
    double delta = 0.1;
    auto* theorem = app.add_subcommand("theorem1", "Print the exploration threshold Q and W");
    theorem->add_option("--N", n_bands, "Number of bands")->required();
    theorem->add_option("--K", k_branches, "Number of branches")->required();
    theorem->add_option("--mu", mu, "Minimum statistic gap")->required();
    theorem->add_option("--delta", delta, "Failure probability")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto config = wss::load_config(config_path);
            apply_overrides(config, settings);
            wss::validate(config);
            const auto series = wss::run_experiment(config);
            const auto files = wss::emit_results(series, config, output_dir(out_flag));
            print_summary(config, series);
            std::cout << "wrote " << files.series.string() << '\n';
        } else if (*sweep) {
            auto base = sweep_config.empty() ? wss::ExperimentConfig{} : wss::load_config(sweep_config);
            apply_overrides(base, settings);
            const auto dir = output_dir(out_flag);
            for (const auto& value : sweep_values) {
                auto config = base;
                wss::apply_setting(config, sweep_param, value);
                config.name = base.name + "_" + sweep_param + value;
                wss::validate(config);
                const auto series = wss::run_experiment(config);
                const auto files = wss::emit_results(series, config, dir);
                print_summary(config, series);
                std::cout << "wrote " << files.series.string() << '\n';
            }
        } else if (*validate) {
            auto config = wss::load_config(validate_path);
            apply_overrides(config, settings);
            wss::validate(config);
            std::cout << validate_path << ": ok\n";
        } else if (*theorem) {
            const auto threshold = wss::exploration_threshold(n_bands, k_branches, mu, delta);
            std::cout << "Q=" << threshold.observations << " W=" << threshold.slots << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
