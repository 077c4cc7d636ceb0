#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "wss/config.hpp"
#include "wss/experiment.hpp"

namespace wss {

/// Header `slot,<P>_throughput,<P>_regret,...` then one row per slot.
void write_series_csv(const MetricSeries& series, std::ostream& out);

/// One row per replication with cumulative throughput, regret and the OLDM
/// sizing switch slot per policy.
void write_replications_csv(const MetricSeries& series, std::ostream& out);

struct EmittedFiles {
    std::filesystem::path series;
    std::filesystem::path replications;
    std::filesystem::path manifest;
};

/// Writes `<name>.csv`, `<name>_replications.csv` and `<name>.manifest`
/// under `directory`, creating it if needed. Throws std::runtime_error with
/// the failing path on I/O errors.
EmittedFiles emit_results(const MetricSeries& series, const ExperimentConfig& config,
                          const std::filesystem::path& directory);

} // namespace wss
