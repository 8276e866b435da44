#pragma once

#include "mimo/simulation.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace mimo {

// Long format: trial, st_index, ft_index, cluster, metric_kind, value.
// Trials and clusters are 1-based; per-FT-CPI rows are thinned by csv_ft_stride.
void write_results_csv(std::ostream& os, const std::vector<RunResult>& runs, const std::string& sweep_axis = "",
                       const std::vector<double>& sweep_values = {});

struct Percentiles {
  double p10 = 0.0, median = 0.0, p90 = 0.0;
};
Percentiles percentiles(std::vector<double> values);

// Fraction of values <= each breakpoint.
std::vector<double> empirical_cdf(const std::vector<double>& values, const std::vector<double>& breakpoints);

nlohmann::json summarize(const RunResult& run);

nlohmann::json manifest(const ScenarioConfig& base, const std::vector<RunResult>& runs, const std::string& command, const std::string& sweep_axis,
                        const std::vector<double>& sweep_values);

// Writes results.csv, summary.json and manifest.json into `dir` (created if missing).
void write_outputs(const std::string& dir, const ScenarioConfig& base, const std::vector<RunResult>& runs, const std::string& command,
                   const std::string& sweep_axis = "", const std::vector<double>& sweep_values = {});

std::string version_string();

}  // namespace mimo
