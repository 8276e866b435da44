#include "support.hpp"

#include "mimo/config.hpp"
#include "mimo/report.hpp"
#include "mimo/simulation.hpp"

#include <map>
#include <numeric>
#include <sstream>

using namespace mimo;
using namespace testing_support;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.n_antennas = 32;
  c.n_rfc = 8;
  c.dbf_rank = 3;
  c.clusters = {{10, 0, 3, 10, 0, 1, {}}, {35, 0, 3, 30, 0, 2, {}}};
  c.n_s = 90;
  c.p_count = 5;
  c.p_max = 50;
  c.trials = 2;
  c.subsample_data = 16;
  c.quadrature_nodes = 64;
  return c;
}

bool same_records(const RunResult& a, const RunResult& b) {
  if (a.realizations.size() != b.realizations.size()) return false;
  for (std::size_t t = 0; t < a.realizations.size(); ++t) {
    const auto& x = a.realizations[t].records;
    const auto& y = b.realizations[t].records;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].value != y[i].value || x[i].kind != y[i].kind || x[i].ft_index != y[i].ft_index ||
          x[i].cluster != y[i].cluster)
        return false;
  }
  return true;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(table_iv_config().validate());
  CHECK_NOTHROW(small_config().validate());

  ScenarioConfig c = small_config();
  c.n_rfc = 9;
  CHECK_THROWS(c.validate());
  c = small_config();
  c.p_max = 52;
  CHECK_THROWS(c.validate());
  c = small_config();
  c.beamformer = BeamformerKind::rd_mmse_bf;
  CHECK_THROWS(c.validate());  // BA-ML needs a statistical beamformer
  c.tracker = TrackerKind::periodogram;
  CHECK_THROWS(c.validate());  // instantaneous BF needs a joint estimator
  c.ft_estimator = FtEstimator::joint_mmse;
  CHECK_NOTHROW(c.validate());
  c = small_config();
  c.given_angle_error_deg = 1.0;
  CHECK_THROWS(c.validate());
  c.mode = Mode::genie_aided;
  CHECK_NOTHROW(c.validate());
  c = small_config();
  c.ml_rank = 3;
  CHECK_THROWS(c.validate());
  c = small_config();
  c.tracker = TrackerKind::sekf;
  c.sekf_rank = 3;
  CHECK_NOTHROW(c.validate());
  c.sekf_rank = 4;
  CHECK_THROWS(c.validate());
  c.beamformer = BeamformerKind::dft_bf;  // the IEC is the 4-beam sector window
  CHECK_NOTHROW(c.validate());

  c = small_config();
  c.n_rfc = 9;
  c.p_max = 52;
  try {
    c.validate();
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("n_rfc") != std::string::npos);
    CHECK(msg.find("p_max") != std::string::npos);
  }
}

TEST_CASE("config JSON round trip and the shipped reference config") {
  const ScenarioConfig c = small_config();
  const ScenarioConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_to_json(load_config(MIMO_SOURCE_DIR "/configs/table_iv.json")) == config_to_json(table_iv_config()));
  nlohmann::json j = config_to_json(c);
  j["n_antenas"] = 3;
  CHECK_THROWS(config_from_json(j));
  j = config_to_json(c);
  j["tracker"] = "kalman";
  CHECK_THROWS(config_from_json(j));
  CHECK(table_iv_config().powers()[1] == doctest::Approx(1e4));
}

TEST_CASE("runs are deterministic and independent of the worker count") {
  const ScenarioConfig c = small_config();
  const RunResult a = run_experiment(c, 1);
  const RunResult b = run_experiment(c, 1);
  const RunResult w = run_experiment(c, 2);
  CHECK(same_records(a, b));
  CHECK(same_records(a, w));
  ScenarioConfig other = c;
  other.seed = 2;
  CHECK(!same_records(a, run_experiment(other, 1)));
  // Trial t is the same whether or not other trials run.
  ScenarioConfig more = c;
  more.trials = 3;
  const RunResult m = run_experiment(more, 1);
  CHECK(m.realizations[1].records.size() == a.realizations[1].records.size());
  CHECK(m.realizations[1].records.back().value == a.realizations[1].records.back().value);
}

TEST_CASE("P = 1 and p_max = 1 scheduling") {
  ScenarioConfig c = small_config();
  c.p_count = 1;
  c.p_max = 1;
  c.trials = 1;
  const RealizationResult r = run_realization(c, 0);
  CHECK(r.termination == "completed");
  CHECK(r.ft_completed == 1);
  CHECK(r.st_completed == 1);
  long sinr = 0, nmse = 0;
  for (const auto& rec : r.records) {
    sinr += rec.kind == MetricKind::sinr;
    nmse += rec.kind == MetricKind::nmse_empirical;
    CHECK(rec.st_index == 1);
  }
  CHECK(sinr == 2);
  CHECK(nmse == 2);
}

TEST_CASE("record counts for a full run") {
  ScenarioConfig c = small_config();
  c.trials = 1;
  c.metric_clusters = {1};
  const RealizationResult r = run_realization(c, 0);
  REQUIRE(r.termination == "completed");
  CHECK(r.ft_completed == c.p_max);
  CHECK(r.st_completed == c.p_max / c.p_count);
  std::map<MetricKind, int> count;
  for (const auto& rec : r.records) {
    CHECK(rec.cluster == 0);
    ++count[rec.kind];
  }
  CHECK(count[MetricKind::sinr] == c.p_max);
  CHECK(count[MetricKind::nmse_empirical] == c.p_max);
  CHECK(count[MetricKind::nmse_analytic] == c.p_max);
  // One record per tracker step, scored at the next ST-CPI head.
  CHECK(count[MetricKind::angular_error] == c.p_max / c.p_count);
}

TEST_CASE("static high-SNR scene: every tracker stays on the truth") {
  ScenarioConfig c = small_config();
  c.trials = 1;
  c.sigma_theta_sq = 0.0;
  c.sigma_omega_sq = 0.0;
  c.clusters[0].snr_db = 40;
  c.subsample_data = 0;
  c.analytic_nmse = false;
  for (TrackerKind t : {TrackerKind::ba_ml, TrackerKind::sekf, TrackerKind::omp, TrackerKind::periodogram}) {
    c.tracker = t;
    const RunResult run = run_experiment(c, 1);
    const auto err = metric_values(run, MetricKind::angular_error, 0);
    REQUIRE(!err.empty());
    CAPTURE(to_string(t));
    for (double e : err) CHECK(std::abs(e) < 1.0);
  }
}

TEST_CASE("early termination on close clusters") {
  ScenarioConfig c = small_config();
  c.trials = 1;
  c.mode = Mode::genie_aided;
  c.clusters[0].velocity_deg_s = 25.0 / (c.t_f * 40);  // reaches the second cluster after ~40 FT-CPIs
  c.sigma_theta_sq = 0.0;
  c.sigma_omega_sq = 0.0;
  // At N = 32 the sector windows collide near 23 deg, before a 3 deg gap.
  const RealizationResult collide = run_realization(c, 0);
  CHECK(collide.termination == "cluster_collision");
  CHECK(collide.ft_completed == 20);
  // AoA after p + 1 steps is 10 + 0.625 (p + 1) deg; a 15 deg gap is lost at p = 16.
  c.min_separation_deg = 15.0;
  const RealizationResult r = run_realization(c, 0);
  CHECK(r.termination == "min_separation");
  CHECK(r.ft_completed == 16);
  CHECK(r.st_completed == 3);
}

TEST_CASE("sweep helpers") {
  const ScenarioConfig base = small_config();
  CHECK(apply_sweep_value(base, SweepAxis::p, 7).p_max == 56);
  CHECK(apply_sweep_value(base, SweepAxis::snr, 3).clusters[0].snr_db == 3);
  CHECK_THROWS(apply_sweep_value(base, SweepAxis::offset, 1));
  CHECK_THROWS(apply_sweep_value(base, SweepAxis::p, 0.5));
  CHECK(parse_sweep_axis("snr") == SweepAxis::snr);
  CHECK_THROWS(parse_sweep_axis("q"));
  ScenarioConfig one = base;
  one.trials = 1;
  const auto runs = sweep(one, SweepAxis::snr, {0, 20});
  REQUIRE(runs.size() == 2);
  CHECK(pooled_nmse(runs[1], 0) < pooled_nmse(runs[0], 0));
}

TEST_CASE("genie SINR ordering: GEB over DFT selection, full over reduced dimension") {
  ScenarioConfig c = small_config();
  c.mode = Mode::genie_aided;
  c.p_count = 1;
  c.p_max = 100;
  c.trials = 2;
  c.metric_clusters = {1};
  c.analytic_nmse = false;
  std::map<BeamformerKind, double> sinr;
  for (BeamformerKind b : {BeamformerKind::rd_geb, BeamformerKind::fd_geb, BeamformerKind::dft_bf}) {
    c.beamformer = b;
    sinr[b] = mean(metric_values(run_experiment(c, 1), MetricKind::sinr, 0));
  }
  CHECK(sinr[BeamformerKind::rd_geb] > sinr[BeamformerKind::dft_bf]);
  CHECK(sinr[BeamformerKind::fd_geb] >= sinr[BeamformerKind::rd_geb] - 0.1);
}

TEST_CASE("report outputs") {
  ScenarioConfig c = small_config();
  c.trials = 1;
  c.csv_ft_stride = 10;
  const RunResult run = run_experiment(c, 1);
  std::ostringstream os;
  write_results_csv(os, {run});
  const std::string csv = os.str();
  CHECK(csv.rfind("trial,st_index,ft_index,cluster,metric_kind,value\r\n", 0) == 0);
  CHECK(csv.find("\n") == csv.find("\r\n") + 1);
  const nlohmann::json s = summarize(run);
  CHECK(s["trials"] == 1);
  CHECK(s.contains("clusters"));
  const Percentiles p = percentiles({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  CHECK(p.median == doctest::Approx(6));
  CHECK(p.p10 == doctest::Approx(2));
  CHECK(p.p90 == doctest::Approx(10));
  const auto cdf = empirical_cdf({0.1, 0.2, 0.3, 0.4}, {0.0, 0.25, 1.0});
  CHECK(cdf == std::vector<double>{0.0, 0.5, 1.0});
}
