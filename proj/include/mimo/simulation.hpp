#pragma once

#include "mimo/config.hpp"
#include "mimo/metrics.hpp"

#include <string>
#include <vector>

namespace mimo {

struct TrackerDiagnostics {
  long sekf_updates = 0;
  long sekf_skipped = 0;
  double sekf_max_imag_ratio = 0.0;
  long omp_calls = 0;
  long omp_regularized = 0;
  long omp_exhausted = 0;
};

struct RealizationResult {
  int trial = 0;
  std::string termination = "completed";  // or min_separation, aoa_out_of_range, cluster_collision, estimate_out_of_range
  long ft_completed = 0;
  int st_completed = 0;
  std::vector<MetricRecord> records;
  // Per cluster: summed |h^ - h|^2 and |h|^2 over every FT-CPI (ratio-of-sums NMSE).
  std::vector<double> error_energy;
  std::vector<double> truth_energy;
  TrackerDiagnostics diagnostics;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<RealizationResult> realizations;  // ordered by trial index
};

RealizationResult run_realization(const ScenarioConfig& config, int trial);

// workers <= 0 uses the OpenMP default.
RunResult run_experiment(const ScenarioConfig& config, int workers = 1);

enum class SweepAxis { p, snr, offset };

SweepAxis parse_sweep_axis(const std::string& text);
std::string to_string(SweepAxis a);

// Config for one sweep point. `snr` sets the SNR of cluster 1; `p` also rounds
// p_max up to a multiple of P.
ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepAxis axis, double value);

std::vector<RunResult> sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values,
                             int workers = 1);

// Convenience reductions over a run.
std::vector<double> metric_values(const RunResult& run, MetricKind kind, int cluster);
double pooled_nmse(const RunResult& run, int cluster);

}  // namespace mimo
