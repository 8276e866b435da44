#include "mimo/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mimo {

namespace {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

const EnumName<Mode> kModes[] = {{Mode::self_driven, "self_driven"}, {Mode::genie_aided, "genie_aided"}};
const EnumName<TrackerKind> kTrackers[] = {{TrackerKind::ba_ml, "ba_ml"},
                                           {TrackerKind::sekf, "sekf"},
                                           {TrackerKind::omp, "omp"},
                                           {TrackerKind::periodogram, "periodogram"}};
const EnumName<FtEstimator> kEstimators[] = {{FtEstimator::ba_ls, "ba_ls"},
                                             {FtEstimator::joint_ls, "joint_ls"},
                                             {FtEstimator::joint_mmse, "joint_mmse"}};
const EnumName<BeamformerKind> kBeamformers[] = {{BeamformerKind::rd_geb, "rd_geb"},
                                                 {BeamformerKind::fd_geb, "fd_geb"},
                                                 {BeamformerKind::dft_bf, "dft_bf"},
                                                 {BeamformerKind::rd_mmse_bf, "rd_mmse_bf"},
                                                 {BeamformerKind::rd_mmse_bf, "mmse_bf"},
                                                 {BeamformerKind::fd_mmse_bf, "fd_mmse_bf"}};

template <class E, std::size_t K>
E parse_enum(const EnumName<E> (&table)[K], const std::string& text, const char* field) {
  for (const auto& e : table)
    if (text == e.name) return e.value;
  throw std::invalid_argument(std::string("config: unknown value '") + text + "' for " + field);
}

template <class E, std::size_t K>
std::string enum_text(const EnumName<E> (&table)[K], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "unknown";
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_string(Mode m) { return enum_text(kModes, m); }
std::string to_string(TrackerKind t) { return enum_text(kTrackers, t); }
std::string to_string(FtEstimator f) { return enum_text(kEstimators, f); }
std::string to_string(BeamformerKind b) { return enum_text(kBeamformers, b); }

bool ScenarioConfig::is_metric_cluster(int m) const {
  if (metric_clusters.empty()) return true;
  for (int c : metric_clusters)
    if (c == m + 1) return true;
  return false;
}

std::vector<double> ScenarioConfig::powers() const {
  std::vector<double> p;
  for (const auto& c : clusters) p.push_back(noise * std::pow(10.0, c.snr_db / 10.0));
  return p;
}

void ScenarioConfig::validate() const {
  std::ostringstream err;
  const int m = n_clusters();
  if (m < 1) err << "at least one cluster is required; ";
  if (n_antennas < 1) err << "n_antennas must be positive; ";
  if (m > 0 && (n_rfc % m != 0)) err << "n_rfc must be divisible by the cluster count; ";
  if (n_rfc > n_antennas) err << "n_rfc exceeds n_antennas; ";
  if (n_f < 1 || n_s < 0) err << "n_f >= 1 and n_s >= 0 required; ";
  if (!(t_f > 0.0)) err << "t_f must be positive; ";
  if (p_count < 1) err << "p_count must be >= 1; ";
  if (p_max < 1) err << "p_max must be >= 1; ";
  if (p_count >= 1 && p_max % p_count != 0) err << "p_max must be a multiple of p_count; ";
  if (trials < 1) err << "trials must be >= 1; ";
  if (sigma_theta_sq < 0.0 || sigma_omega_sq < 0.0) err << "mobility variances must be nonnegative; ";
  if (ray_count < 1) err << "ray_count must be >= 1; ";
  if (!(grid_resolution_deg > 0.0)) err << "grid_resolution_deg must be positive; ";
  if (!(noise > 0.0)) err << "noise must be positive; ";
  if (subsample_data < -1) err << "subsample_data must be -1, 0 or positive; ";
  if (quadrature_nodes < 2) err << "quadrature_nodes must be >= 2; ";
  if (csv_ft_stride < 1) err << "csv_ft_stride must be >= 1; ";
  const int window = m > 0 ? n_rfc / m : 0;
  for (int i = 0; i < m; ++i) {
    const auto& c = clusters[i];
    if (!(c.spread_deg > 0.0)) err << "cluster " << i + 1 << ": spread_deg must be positive; ";
    if (std::abs(c.aoa_deg) + 0.5 * c.spread_deg >= 90.0) err << "cluster " << i + 1 << ": interval crosses +-90 deg; ";
    if (c.delay < 0) err << "cluster " << i + 1 << ": negative delay; ";
    if (c.user_id < 1) err << "cluster " << i + 1 << ": user_id is 1-based; ";
    const int d = rank_of(i);
    const int limit = full_dimension() ? n_antennas : n_rfc;
    if (beamformer == BeamformerKind::rd_geb || beamformer == BeamformerKind::fd_geb) {
      if (d < 1 || d > limit) err << "cluster " << i + 1 << ": dbf_rank out of range; ";
    }
    int iec_dim = d;
    if (beamformer == BeamformerKind::dft_bf) iec_dim = window;
    if (instantaneous_bf()) iec_dim = 1;
    if (tracker == TrackerKind::ba_ml && ml_rank >= iec_dim)
      err << "cluster " << i + 1 << ": ml_rank must be below the IEC dimension; ";
    if (tracker == TrackerKind::sekf && (sekf_rank < 0 || sekf_rank > iec_dim || instantaneous_bf()))
      err << "cluster " << i + 1 << ": sekf needs a statistical beamformer and 0 <= sekf_rank <= IEC dimension; ";
    if (ft_estimator != FtEstimator::ba_ls && c.delay != 0)
      err << "cluster " << i + 1 << ": joint estimators need delay 0; ";
  }
  if (ml_rank < 1) err << "ml_rank must be >= 1; ";
  if (instantaneous_bf() && ft_estimator == FtEstimator::ba_ls)
    err << "instantaneous beamformers need a joint ft_estimator; ";
  if (instantaneous_bf() && (tracker == TrackerKind::ba_ml || tracker == TrackerKind::sekf))
    err << "ba_ml/sekf trackers need a statistical beamformer; ";
  for (int c : metric_clusters)
    if (c < 1 || c > m) err << "metric_clusters entry " << c << " out of range; ";
  for (int c : offset_clusters)
    if (c < 1 || c > m) err << "offset_clusters entry " << c << " out of range; ";
  if (given_angle_error_deg != 0.0 && mode != Mode::genie_aided)
    err << "given_angle_error_deg applies to genie_aided mode only; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument("invalid config: " + msg);
}

ScenarioConfig table_iv_config() {
  ScenarioConfig c;
  const double aoas[4] = {10.0, 20.0, -10.0, -20.0};
  const double snrs[4] = {10.0, 40.0, 30.0, 30.0};
  for (int m = 0; m < 4; ++m) {
    ClusterConfig cl;
    cl.aoa_deg = aoas[m];
    cl.snr_db = snrs[m];
    cl.spread_deg = 3.0;
    cl.user_id = m + 1;
    c.clusters.push_back(cl);
  }
  return c;
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  read(j, "n_antennas", c.n_antennas);
  read(j, "n_rfc", c.n_rfc);
  read(j, "dbf_rank", c.dbf_rank);
  read(j, "n_f", c.n_f);
  read(j, "n_s", c.n_s);
  read(j, "t_f", c.t_f);
  read(j, "p_count", c.p_count);
  read(j, "p_max", c.p_max);
  read(j, "trials", c.trials);
  read(j, "seed", c.seed);
  read(j, "sigma_theta_sq", c.sigma_theta_sq);
  read(j, "sigma_omega_sq", c.sigma_omega_sq);
  read(j, "ray_count", c.ray_count);
  read(j, "grid_resolution_deg", c.grid_resolution_deg);
  read(j, "noise", c.noise);
  read(j, "subsample_data", c.subsample_data);
  read(j, "ml_rank", c.ml_rank);
  read(j, "sekf_rank", c.sekf_rank);
  read(j, "sekf_aoa_std_deg", c.sekf_aoa_std_deg);
  read(j, "sekf_velocity_std_deg_s", c.sekf_velocity_std_deg_s);
  read(j, "given_angle_error_deg", c.given_angle_error_deg);
  read(j, "offset_clusters", c.offset_clusters);
  read(j, "metric_clusters", c.metric_clusters);
  read(j, "quadrature_nodes", c.quadrature_nodes);
  read(j, "analytic_nmse", c.analytic_nmse);
  read(j, "min_separation_deg", c.min_separation_deg);
  read(j, "max_abs_aoa_deg", c.max_abs_aoa_deg);
  read(j, "csv_ft_stride", c.csv_ft_stride);
  if (j.contains("mode")) c.mode = parse_enum(kModes, j.at("mode").get<std::string>(), "mode");
  if (j.contains("tracker")) c.tracker = parse_enum(kTrackers, j.at("tracker").get<std::string>(), "tracker");
  if (j.contains("ft_estimator"))
    c.ft_estimator = parse_enum(kEstimators, j.at("ft_estimator").get<std::string>(), "ft_estimator");
  if (j.contains("beamformer"))
    c.beamformer = parse_enum(kBeamformers, j.at("beamformer").get<std::string>(), "beamformer");
  if (j.contains("ray_placement")) {
    const std::string rp = j.at("ray_placement").get<std::string>();
    if (rp == "equispaced") c.ray_placement = RayPlacement::equispaced;
    else if (rp == "random") c.ray_placement = RayPlacement::random;
    else throw std::invalid_argument("config: unknown ray_placement '" + rp + "'");
  }
  if (j.contains("clusters")) {
    for (const auto& cj : j.at("clusters")) {
      ClusterConfig cl;
      read(cj, "aoa_deg", cl.aoa_deg);
      read(cj, "velocity_deg_s", cl.velocity_deg_s);
      read(cj, "spread_deg", cl.spread_deg);
      read(cj, "snr_db", cl.snr_db);
      read(cj, "delay", cl.delay);
      read(cj, "user_id", cl.user_id);
      if (cj.contains("dbf_rank")) cl.dbf_rank = cj.at("dbf_rank").get<int>();
      c.clusters.push_back(cl);
    }
  }
  static const char* known[] = {"n_antennas", "n_rfc", "dbf_rank", "n_f", "n_s", "t_f", "p_count", "p_max", "trials",
                                "seed", "sigma_theta_sq", "sigma_omega_sq", "ray_count", "grid_resolution_deg",
                                "noise", "subsample_data", "ml_rank", "sekf_rank", "sekf_aoa_std_deg",
                                "sekf_velocity_std_deg_s", "given_angle_error_deg", "offset_clusters",
                                "metric_clusters", "quadrature_nodes", "analytic_nmse", "min_separation_deg",
                                "max_abs_aoa_deg", "csv_ft_stride", "mode", "tracker", "ft_estimator", "beamformer",
                                "ray_placement", "clusters"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument("config: unknown field '" + it.key() + "'");
  }
  return c;
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["n_antennas"] = c.n_antennas;
  j["n_rfc"] = c.n_rfc;
  j["dbf_rank"] = c.dbf_rank;
  j["n_f"] = c.n_f;
  j["n_s"] = c.n_s;
  j["t_f"] = c.t_f;
  j["p_count"] = c.p_count;
  j["p_max"] = c.p_max;
  j["trials"] = c.trials;
  j["mode"] = to_string(c.mode);
  j["tracker"] = to_string(c.tracker);
  j["ft_estimator"] = to_string(c.ft_estimator);
  j["beamformer"] = to_string(c.beamformer);
  j["seed"] = c.seed;
  j["sigma_theta_sq"] = c.sigma_theta_sq;
  j["sigma_omega_sq"] = c.sigma_omega_sq;
  j["ray_count"] = c.ray_count;
  j["ray_placement"] = c.ray_placement == RayPlacement::equispaced ? "equispaced" : "random";
  j["grid_resolution_deg"] = c.grid_resolution_deg;
  j["noise"] = c.noise;
  j["subsample_data"] = c.subsample_data;
  j["ml_rank"] = c.ml_rank;
  j["sekf_rank"] = c.sekf_rank;
  j["sekf_aoa_std_deg"] = c.sekf_aoa_std_deg;
  j["sekf_velocity_std_deg_s"] = c.sekf_velocity_std_deg_s;
  j["given_angle_error_deg"] = c.given_angle_error_deg;
  j["offset_clusters"] = c.offset_clusters;
  j["metric_clusters"] = c.metric_clusters;
  j["quadrature_nodes"] = c.quadrature_nodes;
  j["analytic_nmse"] = c.analytic_nmse;
  j["min_separation_deg"] = c.min_separation_deg;
  j["max_abs_aoa_deg"] = c.max_abs_aoa_deg;
  j["csv_ft_stride"] = c.csv_ft_stride;
  j["clusters"] = nlohmann::json::array();
  for (const auto& cl : c.clusters) {
    nlohmann::json cj{{"aoa_deg", cl.aoa_deg}, {"velocity_deg_s", cl.velocity_deg_s}, {"spread_deg", cl.spread_deg},
                      {"snr_db", cl.snr_db},   {"delay", cl.delay},                   {"user_id", cl.user_id}};
    if (cl.dbf_rank) cj["dbf_rank"] = *cl.dbf_rank;
    j["clusters"].push_back(cj);
  }
  return j;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace mimo
