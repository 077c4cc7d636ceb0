#include "wss/results_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace wss {

namespace {

std::string cell(double value) {
    if (!std::isfinite(value)) {
        throw std::runtime_error("refusing to emit a non-finite metric value");
    }
    return format_double(value);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw std::runtime_error("failed while writing " + path.string());
    }
}

} // namespace

void write_series_csv(const MetricSeries& series, std::ostream& out) {
    out << "slot";
    for (const auto& p : series.policies) {
        out << ',' << to_string(p.mode) << "_throughput," << to_string(p.mode) << "_regret";
    }
    out << '\n';
    for (std::int64_t t = 0; t < series.horizon; ++t) {
        out << t;
        const auto i = static_cast<std::size_t>(t);
        for (const auto& p : series.policies) {
            out << ',' << cell(p.mean_throughput[i]) << ',' << cell(p.mean_regret[i]);
        }
        out << '\n';
    }
}

void write_replications_csv(const MetricSeries& series, std::ostream& out) {
    out << "replication";
    for (const auto& p : series.policies) {
        const auto name = to_string(p.mode);
        out << ',' << name << "_total_throughput," << name << "_total_regret," << name
            << "_sizing_switch_slot";
    }
    out << '\n';
    for (int r = 0; r < series.replications; ++r) {
        out << r;
        const auto i = static_cast<std::size_t>(r);
        for (const auto& p : series.policies) {
            out << ',' << cell(p.final_throughput[i]) << ',' << cell(p.final_regret[i]) << ','
                << p.sizing_switch_slot[i];
        }
        out << '\n';
    }
}

EmittedFiles emit_results(const MetricSeries& series, const ExperimentConfig& config,
                          const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + directory.string() + ": " +
                                 ec.message());
    }
    EmittedFiles files{directory / (config.name + ".csv"),
                       directory / (config.name + "_replications.csv"),
                       directory / (config.name + ".manifest")};
    {
        auto out = open_for_write(files.series);
        write_series_csv(series, out);
        finish(out, files.series);
    }
    {
        auto out = open_for_write(files.replications);
        write_replications_csv(series, out);
        finish(out, files.replications);
    }
    {
        auto out = open_for_write(files.manifest);
        out << "# resolved experiment configuration; rerun with: wss_cli run <this file>\n"
            << format_config(config);
        finish(out, files.manifest);
    }
    return files;
}

} // namespace wss
