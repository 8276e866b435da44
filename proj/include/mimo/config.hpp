#pragma once

#include "mimo/channel.hpp"
#include "mimo/tracking.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mimo {

enum class Mode { self_driven, genie_aided };
enum class FtEstimator { ba_ls, joint_ls, joint_mmse };
enum class BeamformerKind { rd_geb, fd_geb, dft_bf, rd_mmse_bf, fd_mmse_bf };

struct ClusterConfig {
  double aoa_deg = 0.0;
  double velocity_deg_s = 0.0;
  double spread_deg = 3.0;
  double snr_db = 10.0;
  int delay = 0;
  int user_id = 1;  // 1-based
  std::optional<int> dbf_rank;
};

struct ScenarioConfig {
  int n_antennas = 128;
  int n_rfc = 16;
  int dbf_rank = 3;
  std::vector<ClusterConfig> clusters;
  int n_f = 10;
  int n_s = 990;
  double t_f = 1e-5;
  int p_count = 1000;
  long p_max = 20000;
  int trials = 50;
  Mode mode = Mode::self_driven;
  TrackerKind tracker = TrackerKind::ba_ml;
  FtEstimator ft_estimator = FtEstimator::ba_ls;
  BeamformerKind beamformer = BeamformerKind::rd_geb;
  std::uint64_t seed = 1;
  double sigma_theta_sq = 1.45e-4;  // deg^2 per FT-CPI
  double sigma_omega_sq = 1.46e-6;  // (deg/s)^2 per FT-CPI
  int ray_count = 100;
  RayPlacement ray_placement = RayPlacement::equispaced;
  double grid_resolution_deg = 0.1;
  double noise = 1.0;
  int subsample_data = 64;  // -1: all N_S symbols, 0: no data mode
  int ml_rank = 2;
  int sekf_rank = 0;  // 0: the full IEC dimension
  double sekf_aoa_std_deg = 0.5;
  double sekf_velocity_std_deg_s = 2.0;
  double given_angle_error_deg = 0.0;
  std::vector<int> offset_clusters = {1};  // 1-based
  std::vector<int> metric_clusters;        // 1-based; empty means all
  int quadrature_nodes = 257;
  bool analytic_nmse = true;
  double min_separation_deg = 3.0;
  double max_abs_aoa_deg = 60.0;
  int csv_ft_stride = 1;

  int n_clusters() const { return static_cast<int>(clusters.size()); }
  int rank_of(int m) const { return clusters[m].dbf_rank.value_or(dbf_rank); }
  bool full_dimension() const {
    return beamformer == BeamformerKind::fd_geb || beamformer == BeamformerKind::fd_mmse_bf;
  }
  bool instantaneous_bf() const {
    return beamformer == BeamformerKind::rd_mmse_bf || beamformer == BeamformerKind::fd_mmse_bf;
  }
  bool is_metric_cluster(int m) const;  // 0-based
  std::vector<double> powers() const;   // linear, N0 * 10^(snr/10)

  // Throws std::invalid_argument with every problem found.
  void validate() const;
};

// Reference scenario: four clusters at 10, 20, -10, -20 deg.
ScenarioConfig table_iv_config();

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& c);
ScenarioConfig load_config(const std::string& path);

std::string to_string(Mode m);
std::string to_string(TrackerKind t);
std::string to_string(FtEstimator f);
std::string to_string(BeamformerKind b);

}  // namespace mimo
