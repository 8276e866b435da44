#include "mimo/report.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace mimo {

std::string version_string() { return "0.1.0"; }

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

const MetricKind kKinds[] = {MetricKind::nmse_analytic, MetricKind::nmse_empirical, MetricKind::sinr,
                             MetricKind::angular_error};

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<RunResult>& runs, const std::string& sweep_axis,
                       const std::vector<double>& sweep_values) {
  const bool swept = !sweep_axis.empty();
  if (swept) os << "sweep_" << sweep_axis << ',';
  os << "trial,st_index,ft_index,cluster,metric_kind,value\r\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int stride = runs[i].config.csv_ft_stride;
    for (const auto& real : runs[i].realizations) {
      for (const auto& rec : real.records) {
        if (rec.ft_index > 0 && (rec.ft_index - 1) % stride != 0) continue;
        if (swept) os << format_value(sweep_values.at(i)) << ',';
        os << rec.trial + 1 << ',' << rec.st_index << ',' << rec.ft_index << ',' << rec.cluster + 1 << ','
           << metric_name(rec.kind) << ',' << format_value(rec.value) << "\r\n";
      }
    }
  }
}

Percentiles percentiles(std::vector<double> values) {
  Percentiles p;
  if (values.empty()) return p;
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - lo) * (values[hi] - values[lo]);
  };
  p.p10 = at(0.1);
  p.median = at(0.5);
  p.p90 = at(0.9);
  return p;
}

std::vector<double> empirical_cdf(const std::vector<double>& values, const std::vector<double>& breakpoints) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  for (double b : breakpoints) {
    const auto n = std::upper_bound(sorted.begin(), sorted.end(), b) - sorted.begin();
    out.push_back(sorted.empty() ? 0.0 : static_cast<double>(n) / sorted.size());
  }
  return out;
}

nlohmann::json summarize(const RunResult& run) {
  nlohmann::json j;
  std::map<std::string, int> reasons;
  TrackerDiagnostics diag;
  long ft = 0;
  for (const auto& r : run.realizations) {
    ++reasons[r.termination];
    ft += r.ft_completed;
    diag.sekf_updates += r.diagnostics.sekf_updates;
    diag.sekf_skipped += r.diagnostics.sekf_skipped;
    diag.sekf_max_imag_ratio = std::max(diag.sekf_max_imag_ratio, r.diagnostics.sekf_max_imag_ratio);
    diag.omp_calls += r.diagnostics.omp_calls;
    diag.omp_regularized += r.diagnostics.omp_regularized;
    diag.omp_exhausted += r.diagnostics.omp_exhausted;
  }
  j["trials"] = run.realizations.size();
  j["ft_cpis_completed"] = ft;
  j["termination"] = reasons;
  j["diagnostics"] = {{"sekf_updates", diag.sekf_updates},
                      {"sekf_skipped", diag.sekf_skipped},
                      {"sekf_max_imag_ratio", diag.sekf_max_imag_ratio},
                      {"omp_calls", diag.omp_calls},
                      {"omp_regularized", diag.omp_regularized},
                      {"omp_exhausted", diag.omp_exhausted}};
  std::vector<double> angle_grid, nmse_grid;
  for (int d = 0; d <= 10; ++d) angle_grid.push_back(d);
  for (int i = 0; i <= 20; ++i) nmse_grid.push_back(0.05 * i);

  j["clusters"] = nlohmann::json::array();
  for (int m = 0; m < run.config.n_clusters(); ++m) {
    nlohmann::json c;
    c["cluster"] = m + 1;
    for (MetricKind kind : kKinds) {
      const std::vector<double> v = metric_values(run, kind, m);
      if (v.empty()) continue;
      nlohmann::json s;
      double sum = 0.0;
      for (double x : v) sum += x;
      const Percentiles p = percentiles(v);
      s["count"] = v.size();
      s["mean"] = sum / v.size();
      s["p10"] = p.p10;
      s["median"] = p.median;
      s["p90"] = p.p90;
      if (kind == MetricKind::sinr) {
        double lin = 0.0;
        for (double x : v) lin += std::pow(10.0, x / 10.0);
        s["mean_of_linear_db"] = 10.0 * std::log10(lin / v.size());
      }
      if (kind == MetricKind::nmse_empirical) {
        s["pooled"] = pooled_nmse(run, m);
        s["cdf_grid"] = nmse_grid;
        s["cdf"] = empirical_cdf(v, nmse_grid);
      }
      if (kind == MetricKind::angular_error) {
        double sq = 0.0;
        std::vector<double> abs_err;
        for (double x : v) {
          sq += x * x;
          abs_err.push_back(std::abs(x));
        }
        s["rmse_deg"] = std::sqrt(sq / v.size());
        s["abs_cdf_grid_deg"] = angle_grid;
        s["abs_cdf"] = empirical_cdf(abs_err, angle_grid);
      }
      c[metric_name(kind)] = s;
    }
    j["clusters"].push_back(c);
  }
  return j;
}

nlohmann::json manifest(const ScenarioConfig& base, const std::vector<RunResult>& runs, const std::string& command, const std::string& sweep_axis,
                        const std::vector<double>& sweep_values) {
  nlohmann::json j;
  j["tool"] = "mimo-sim";
  j["version"] = version_string();
  j["command"] = command;
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  j["compiler"] = __VERSION__;
  if (!sweep_axis.empty()) {
    j["sweep_axis"] = sweep_axis;
    j["sweep_values"] = sweep_values;
  }
  j["seed"] = base.seed;
  j["config"] = config_to_json(base);
  j["runs"] = nlohmann::json::array();
  for (const auto& r : runs) j["runs"].push_back({{"seed", r.config.seed}, {"config", config_to_json(r.config)}});
  return j;
}

void write_outputs(const std::string& dir, const ScenarioConfig& base, const std::vector<RunResult>& runs, const std::string& command,
                   const std::string& sweep_axis, const std::vector<double>& sweep_values) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  {
    std::ofstream csv(root / "results.csv", std::ios::binary);
    write_results_csv(csv, runs, sweep_axis, sweep_values);
    if (!csv) throw std::runtime_error("failed to write results.csv");
  }
  nlohmann::json summary;
  if (runs.size() == 1 && sweep_axis.empty()) {
    summary = summarize(runs.front());
  } else {
    summary["sweep_axis"] = sweep_axis;
    summary["points"] = nlohmann::json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      nlohmann::json pt = summarize(runs[i]);
      pt["value"] = sweep_values.at(i);
      summary["points"].push_back(pt);
    }
  }
  std::ofstream(root / "summary.json") << summary.dump(2) << '\n';
  std::ofstream(root / "manifest.json") << manifest(base, runs, command, sweep_axis, sweep_values).dump(2) << '\n';
}

}  // namespace mimo
