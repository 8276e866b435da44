#include "mimo/config.hpp"
#include "mimo/metrics.hpp"
#include "mimo/report.hpp"
#include "mimo/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_cpi(double fc_over_w, double speed, double d_over_lambda, int antennas) {
  const mimo::CpiSizes s = mimo::cpi_calculator(fc_over_w, speed, d_over_lambda, antennas);
  std::printf("symbols_per_ftcpi %.10g (2 s.f.: %.2g)\n", s.symbols_per_ftcpi, mimo::round_sig2(s.symbols_per_ftcpi));
  std::printf("ftcpis_per_stcpi %.10g (2 s.f.: %.2g)\n", s.ftcpis_per_stcpi, mimo::round_sig2(s.ftcpis_per_stcpi));
}

void print_cpi_table() {
  const double ratios[] = {30, 100, 300, 1000};
  const double speeds[] = {0.1, 1, 10};
  std::printf("symbols per FT-CPI (rows fc/W, columns v = 0.1, 1, 10 m/s)\n");
  for (double r : ratios) {
    std::printf("%6g", r);
    for (double v : speeds) std::printf(" %12.6g", mimo::cpi_calculator(r, v, 1.0, 1).symbols_per_ftcpi);
    std::printf("\n");
  }
  const double dl[] = {1e3, 3e3, 10e3, 30e3};
  const int ants[] = {16, 64, 128};
  std::printf("FT-CPIs per ST-CPI (rows d/lambda, columns N = 16, 64, 128)\n");
  for (double d : dl) {
    std::printf("%6g", d);
    for (int n : ants) std::printf(" %12.6g", mimo::cpi_calculator(1.0, 1.0, d, n).ftcpis_per_stcpi);
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-timescale hybrid-beamforming link simulator"};
  app.require_subcommand(1);
  int workers = 1;
  int subsample = -2;
  app.add_option("--workers", workers, "Trial-level worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--subsample-data", subsample, "Data symbols per FT-CPI used for SINR (-1: all, 0: off)");

  std::string config_path, out_dir, axis, values;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* simulate = app.add_subcommand("simulate", "Run one Monte-Carlo experiment");
  simulate->add_option("--config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Master seed (overrides the config)");
  simulate->add_option("--out", out_dir, "Output directory")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per axis value");
  sweep_cmd->add_option("--config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--axis", axis, "p, snr or offset")->required()->check(CLI::IsMember({"p", "snr", "offset"}));
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--seed", seed, "Master seed (overrides the config)");
  sweep_cmd->add_option("--out", out_dir, "Output directory")->required();

  double fc_over_w = 0, speed = 0, d_over_lambda = 0;
  int antennas = 0;
  bool table = false;
  auto* cpi = app.add_subcommand("cpi", "CPI sizes from carrier/bandwidth ratio, speed and distance");
  cpi->add_option("--fc-over-w", fc_over_w, "Carrier frequency over bandwidth");
  cpi->add_option("--speed", speed, "Speed in m/s");
  cpi->add_option("--d-over-lambda", d_over_lambda, "Distance over wavelength");
  cpi->add_option("--antennas", antennas, "Array size N");
  cpi->add_flag("--table", table, "Print the full reference grid");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cpi->parsed()) {
      if (table) {
        print_cpi_table();
      } else {
        if (fc_over_w <= 0 || speed <= 0 || d_over_lambda <= 0 || antennas <= 0)
          throw std::invalid_argument("cpi needs --fc-over-w, --speed, --d-over-lambda and --antennas (or --table)");
        print_cpi(fc_over_w, speed, d_over_lambda, antennas);
      }
      return 0;
    }
    seed_given = (simulate->parsed() ? simulate : sweep_cmd)->count("--seed") > 0;
    mimo::ScenarioConfig cfg = mimo::load_config(config_path);
    if (seed_given) cfg.seed = seed;
    if (subsample != -2) cfg.subsample_data = subsample;
    cfg.validate();
    if (simulate->parsed()) {
      const mimo::RunResult run = mimo::run_experiment(cfg, workers);
      mimo::write_outputs(out_dir, cfg, {run}, "simulate");
      std::cout << mimo::summarize(run).dump(2) << '\n';
    } else {
      const mimo::SweepAxis ax = mimo::parse_sweep_axis(axis);
      const std::vector<double> vals = parse_values(values);
      const std::vector<mimo::RunResult> runs = mimo::sweep(cfg, ax, vals, workers);
      mimo::write_outputs(out_dir, cfg, runs, "sweep", mimo::to_string(ax), vals);
      std::cout << "wrote " << runs.size() << " sweep points to " << out_dir << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
