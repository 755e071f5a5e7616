#pragma once

#include "tsobf/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tsobf {

/// Writes the report JSON for one configuration. Timing samples are included
/// only when include_timing is set (they are wall-clock and break rerun
/// reproducibility).
void write_report_json(const std::filesystem::path& path, const MetricsReport& report,
                       bool include_timing = false);

/// CSV with header "x,fraction": empirical CDF of the given values.
void write_cdf_csv(const std::filesystem::path& path, const std::vector<double>& values,
                   int points = 100);

/// Emits <dataset>_report_<tag>.json plus one CDF CSV per metric
/// (<dataset>_<metric>_<tag>.csv) from the obfuscated-variant per-user
/// values. Returns the paths written.
std::vector<std::filesystem::path> write_report_bundle(const std::filesystem::path& out_dir,
                                                       const MetricsReport& report,
                                                       const std::string& tag,
                                                       bool include_timing = false);

} // namespace tsobf
