#include "mimo/simulation.hpp"

#include "mimo/beamform.hpp"
#include "mimo/channel.hpp"
#include "mimo/ft_estim.hpp"
#include "mimo/tracking.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <stdexcept>

namespace mimo {

namespace {

constexpr std::uint64_t kMobilityStream = 0;
constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kDataStream = 2;

double deg2_to_rad2(double v) { return v * (kPi / 180.0) * (kPi / 180.0); }

// "" when the AoAs are admissible.
std::string check_geometry(const std::vector<double>& aoa, const ScenarioConfig& cfg) {
  const double lim = deg2rad(cfg.max_abs_aoa_deg);
  for (double a : aoa)
    if (std::abs(a) > lim) return "aoa_out_of_range";
  const double gap = deg2rad(cfg.min_separation_deg);
  for (std::size_t i = 0; i < aoa.size(); ++i)
    for (std::size_t j = i + 1; j < aoa.size(); ++j)
      if (std::abs(aoa[i] - aoa[j]) < gap) return "min_separation";
  return "";
}

// kappa_l = sum_d sum_b T(b, d) conj(T(b + l, d)); with these,
// tr(T^H R T) = c_0 kappa_0 + 2 Re sum_{l>0} c_l kappa_l for Toeplitz R.
CVec lag_weights(const CMat& t) {
  const Eigen::Index n = t.rows();
  CVec kappa = CVec::Zero(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    cd acc = 0.0;
    for (Eigen::Index d = 0; d < t.cols(); ++d)
      acc += t.col(d).tail(n - l).dot(t.col(d).head(n - l));
    kappa[l] = acc;
  }
  return kappa;
}

double toeplitz_trace(const CVec& lags, const CVec& kappa) {
  double tr = (lags[0] * kappa[0]).real();
  for (Eigen::Index l = 1; l < lags.size(); ++l) tr += 2.0 * (lags[l] * kappa[l]).real();
  return tr;
}

cd qpsk(Rng& rng) {
  static const cd alphabet[4] = {std::polar(1.0, kPi / 4), std::polar(1.0, 3 * kPi / 4),
                                 std::polar(1.0, -3 * kPi / 4), std::polar(1.0, -kPi / 4)};
  std::uniform_int_distribution<int> pick(0, 3);
  return alphabet[pick(rng)];
}

class Realization {
public:
  Realization(const ScenarioConfig& cfg, int trial)
      : cfg_(cfg),
        m_(cfg.n_clusters()),
        n_(cfg.n_antennas),
        dim_(cfg.full_dimension() ? cfg.n_antennas : cfg.n_rfc),
        powers_(cfg.powers()),
        codebook_(cfg.n_antennas),
        channel_rng_(make_stream(cfg.seed, trial, kChannelStream)),
        data_rng_(make_stream(cfg.seed, trial, kDataStream)) {
    out_.trial = trial;
    out_.error_energy.assign(m_, 0.0);
    out_.truth_energy.assign(m_, 0.0);
    for (int m = 0; m < m_; ++m) {
      const auto& c = cfg.clusters[m];
      ClusterTruth t;
      t.mean_aoa = deg2rad(c.aoa_deg);
      t.angular_velocity = deg2rad(c.velocity_deg_s);
      t.angular_spread = deg2rad(c.spread_deg);
      t.power = powers_[m];
      t.delay = c.delay;
      t.user_id = c.user_id;
      t.validate();
      truth_.push_back(t);
      processed_.push_back(cfg.mode == Mode::self_driven || cfg.is_metric_cluster(m));
    }
    mobility_ = MobilityModel::make(cfg.t_f, deg2_to_rad2(cfg.sigma_theta_sq), deg2_to_rad2(cfg.sigma_omega_sq));
    build_trajectory(trial);
  }

  RealizationResult run();

private:
  void build_trajectory(int trial);
  double truth_aoa(long p, int m) const { return traj_[p * m_ + m][0]; }
  void terminate(const std::string& reason) {
    if (out_.termination == "completed") out_.termination = reason;
  }
  void record(int st, long ft, int m, MetricKind kind, double value) {
    out_.records.push_back({out_.trial, st, ft, m, kind, value});
  }
  bool design_dbfs(BeamformerSet& bf, const BeamformerSet& sector, const std::vector<double>& aoa_bf);
  void run_data_mode(int st, long ft, const BeamformerSet& bf, const std::vector<CVec>& hbar,
                     const std::vector<CVec>& iec);

  const ScenarioConfig& cfg_;
  int m_, n_, dim_;
  std::vector<double> powers_;
  SectorCodebook codebook_;
  Rng channel_rng_, data_rng_;
  MobilityModel mobility_;
  std::vector<ClusterTruth> truth_;
  std::vector<bool> processed_;
  std::vector<Vec2> traj_;  // (K P + 1) x M states
  long p_term_ = 0;
  std::string geometry_reason_;  // applied only once the loop reaches p_term_
  std::map<std::vector<int>, std::vector<CMat>> rd_cache_;
  RealizationResult out_;
};

void Realization::build_trajectory(int trial) {
  const long total = cfg_.p_max;
  Rng rng = make_stream(cfg_.seed, trial, kMobilityStream);
  traj_.resize((total + 1) * m_);
  std::vector<Vec2> state(m_);
  for (int m = 0; m < m_; ++m) state[m] = Vec2(truth_[m].mean_aoa, truth_[m].angular_velocity);
  p_term_ = total;
  std::vector<double> aoa(m_);
  for (long p = 0; p <= total; ++p) {
    for (int m = 0; m < m_; ++m) {
      state[m] = advance_mobility(state[m], mobility_, rng);
      traj_[p * m_ + m] = state[m];
      aoa[m] = state[m][0];
    }
    if (p < total && p_term_ == total) {
      const std::string why = check_geometry(aoa, cfg_);
      if (!why.empty()) {
        p_term_ = p;
        geometry_reason_ = why;
      }
    }
  }
}

bool Realization::design_dbfs(BeamformerSet& bf, const BeamformerSet& sector, const std::vector<double>& aoa_bf) {
  switch (cfg_.beamformer) {
    case BeamformerKind::rd_geb: {
      std::vector<int> key;
      for (const auto& w : sector.dft_indices) key.insert(key.end(), w.begin(), w.end());
      auto it = rd_cache_.find(key);
      if (it == rd_cache_.end()) {
        const ReducedCcms red = approx_reduced_ccms(sector, codebook_, powers_, cfg_.noise);
        std::vector<CMat> w(m_);
        for (int m = 0; m < m_; ++m)
          if (processed_[m]) w[m] = rd_geb(red.rbar[m], red.psibar, cfg_.rank_of(m));
        it = rd_cache_.emplace(key, std::move(w)).first;
      }
      for (int m = 0; m < m_; ++m)
        if (processed_[m]) bf.set_dbf(m, it->second[m]);
      return true;
    }
    case BeamformerKind::fd_geb: {
      std::vector<HermitianMatrix> ccms;
      for (int m = 0; m < m_; ++m)
        ccms.push_back(cluster_ccm(aoa_bf[m], truth_[m].angular_spread, n_, cfg_.quadrature_nodes));
      const HermitianMatrix psi = total_covariance(ccms, powers_, cfg_.noise);
      for (int m = 0; m < m_; ++m)
        if (processed_[m]) bf.set_dbf(m, fd_geb(ccms[m], psi, cfg_.rank_of(m)));
      return true;
    }
    case BeamformerKind::dft_bf:
      for (int m = 0; m < m_; ++m)
        if (processed_[m]) bf.set_dbf(m, dft_bf(sector, m));
      return true;
    case BeamformerKind::rd_mmse_bf:
    case BeamformerKind::fd_mmse_bf:
      return false;  // built from the first FT-CPI's joint estimates
  }
  return false;
}

void Realization::run_data_mode(int st, long ft, const BeamformerSet& bf, const std::vector<CVec>& hbar,
                                const std::vector<CVec>& iec) {
  int n_data = cfg_.subsample_data < 0 ? cfg_.n_s : std::min(cfg_.subsample_data, cfg_.n_s);
  if (n_data <= 0) return;
  std::vector<int> active;
  for (int m = 0; m < m_; ++m)
    if (processed_[m] && cfg_.is_metric_cluster(m)) active.push_back(m);
  if (active.empty()) return;
  // Per active cluster: W^H h_bar for every cluster, and the combiner.
  std::vector<CMat> gains(m_);
  std::vector<CMat> wh(m_);
  for (int m : active) {
    wh[m] = bf.dbf[m].adjoint();
    gains[m].resize(wh[m].rows(), m_);
    for (int k = 0; k < m_; ++k) gains[m].col(k) = std::sqrt(powers_[k]) * (wh[m] * hbar[k]);
  }
  std::vector<SinrAccumulator> acc(m_);
  CVec symbols(m_);
  for (int n = 0; n < n_data; ++n) {
    for (int k = 0; k < m_; ++k) symbols[k] = qpsk(data_rng_);
    const CVec noise = sample_complex_gaussian(dim_, cfg_.noise, data_rng_);
    for (int m : active) {
      const CVec z = gains[m] * symbols + wh[m] * noise;
      const cd s_hat = iec[m].dot(z);
      const cd signal = std::sqrt(powers_[m]) * iec[m].squaredNorm() * symbols[m];
      acc[m].add(s_hat, signal);
    }
  }
  for (int m : active) record(st, ft, m, MetricKind::sinr, acc[m].db());
}

RealizationResult Realization::run() {
  const int p_count = cfg_.p_count;
  const long k_total = cfg_.p_max / p_count;
  const int n_f = cfg_.n_f;
  const bool joint = cfg_.ft_estimator != FtEstimator::ba_ls;
  const bool analytic =
      cfg_.analytic_nmse && cfg_.ft_estimator == FtEstimator::ba_ls && !cfg_.instantaneous_bf();
  const bool genie = cfg_.mode == Mode::genie_aided;
  const double resolution = deg2rad(cfg_.grid_resolution_deg);

  std::vector<bool> tracked(m_);
  for (int m = 0; m < m_; ++m) tracked[m] = !genie || cfg_.is_metric_cluster(m);
  std::vector<bool> offset(m_, false);
  for (int c : cfg_.offset_clusters) offset[c - 1] = true;

  std::vector<LowRankBasis> ml_basis, sekf_basis;
  std::vector<SekfState> sekf;
  const auto sekf_rank = [&](int m) {
    if (cfg_.sekf_rank > 0) return cfg_.sekf_rank;
    return cfg_.beamformer == BeamformerKind::dft_bf ? cfg_.n_rfc / m_ : cfg_.rank_of(m);
  };
  for (int m = 0; m < m_; ++m) {
    if (cfg_.tracker == TrackerKind::ba_ml)
      ml_basis.push_back(lowrank_basis(truth_[m].angular_spread, n_, cfg_.ml_rank));
    if (cfg_.tracker == TrackerKind::sekf) {
      sekf_basis.push_back(lowrank_basis(truth_[m].angular_spread, n_, sekf_rank(m)));
      SekfState s = sekf_init(truth_aoa(0, m), deg2rad(cfg_.sekf_aoa_std_deg), deg2rad(cfg_.sekf_velocity_std_deg_s));
      sekf.push_back(s);
    }
  }
  const auto st_model = st_transition(mobility_, p_count);

  std::vector<double> estimate(m_);
  for (int m = 0; m < m_; ++m) estimate[m] = truth_aoa(0, m);

  for (long k = 0; k < k_total; ++k) {
    const long head = k * p_count;
    const int st = static_cast<int>(k + 1);
    if (head >= p_term_) {
      terminate(geometry_reason_);
      break;
    }

    std::vector<double> aoa_bf(m_);
    for (int m = 0; m < m_; ++m) {
      aoa_bf[m] = genie ? truth_aoa(head, m) : estimate[m];
      if (genie && offset[m]) aoa_bf[m] += deg2rad(cfg_.given_angle_error_deg);
    }
    bool admissible = true;
    for (int m = 0; m < m_; ++m)
      if (!(std::abs(aoa_bf[m]) + 0.5 * truth_[m].angular_spread < 0.5 * kPi)) admissible = false;
    if (!admissible) {
      terminate("estimate_out_of_range");
      break;
    }
    BeamformerSet sector;
    try {
      sector = build_abf(aoa_bf, n_, cfg_.n_rfc);
    } catch (const ClusterCollision&) {
      terminate("cluster_collision");
      break;
    }
    BeamformerSet bf = cfg_.full_dimension() ? identity_abf(m_, n_) : sector;
    std::vector<AngleGrid> grids;
    for (int m = 0; m < m_; ++m) grids.push_back(sector_grid(sector.dft_indices[m], n_, resolution));
    const bool statistical = design_dbfs(bf, sector, aoa_bf);

    JointMmsePrior prior;
    if (cfg_.ft_estimator == FtEstimator::joint_mmse) {
      std::vector<HermitianMatrix> blocks;
      for (int m = 0; m < m_; ++m) {
        const CMat full = toeplitz_from_lags(
            ccm_lags(aoa_bf[m], truth_[m].angular_spread, n_, cfg_.quadrature_nodes));
        blocks.emplace_back(cfg_.full_dimension() ? full : CMat(bf.abf.adjoint() * full * bf.abf));
      }
      prior = make_joint_mmse_prior(blocks);
    }
    std::vector<CVec> kappa(m_);
    if (analytic && statistical)
      for (int m = 0; m < m_; ++m)
        if (processed_[m] && cfg_.is_metric_cluster(m)) kappa[m] = lag_weights(bf.total[m]);

    std::vector<std::vector<CVec>> batch(m_);
    OmpBatch omp_batch;
    CMat cov_r;
    if (cfg_.tracker == TrackerKind::periodogram) cov_r = CMat::Zero(dim_, dim_);

    bool partial = false;
    for (long p = head; p < head + p_count; ++p) {
      if (p >= p_term_) {
        terminate(geometry_reason_);
        partial = true;
        break;
      }
      const long ft = p + 1;
      std::vector<CVec> hbar(m_);
      for (int m = 0; m < m_; ++m) {
        ClusterTruth now = truth_[m];
        now.mean_aoa = truth_aoa(p, m);
        const CVec h = draw_channel(now, n_, cfg_.ray_count, channel_rng_, cfg_.ray_placement);
        hbar[m] = cfg_.full_dimension() ? h : CVec(bf.abf.adjoint() * h);
      }
      const TrainingBlock tb = gen_training_block(m_, n_f, channel_rng_);
      const CVec noise = sample_complex_gaussian(static_cast<Eigen::Index>(dim_) * n_f, cfg_.noise, channel_rng_);
      CMat r_block = Eigen::Map<const CMat>(noise.data(), dim_, n_f);
      for (int m = 0; m < m_; ++m)
        r_block.noalias() += std::sqrt(powers_[m]) * hbar[m] * tb.sequences[m].transpose();
      TrainingStats stats = training_stats(r_block, tb.sequences);

      std::vector<CVec> joint_est;
      if (cfg_.ft_estimator == FtEstimator::joint_ls) joint_est = joint_ls(stats, powers_);
      if (cfg_.ft_estimator == FtEstimator::joint_mmse) joint_est = joint_mmse(stats, powers_, prior, cfg_.noise);
      if (!statistical && p == head) {
        CMat h_hat(dim_, m_);
        for (int m = 0; m < m_; ++m) h_hat.col(m) = joint_est[m];
        for (int m = 0; m < m_; ++m)
          if (processed_[m]) bf.set_dbf(m, mmse_bf(h_hat, powers_, cfg_.noise, m));
      }

      std::vector<CVec> lags;
      std::vector<CVec> iec(m_);
      for (int m = 0; m < m_; ++m) {
        if (!processed_[m]) continue;
        const CMat wh = bf.dbf[m].adjoint();
        iec[m] = joint ? CVec(wh * joint_est[m])
                       : CVec(wh * stats.matched[m] / (std::sqrt(powers_[m]) * n_f));
        if (tracked[m] && (cfg_.tracker == TrackerKind::ba_ml || cfg_.tracker == TrackerKind::sekf))
          batch[m].push_back(iec[m]);
        if (!cfg_.is_metric_cluster(m)) continue;
        double err, ref;
        if (joint) {
          err = (joint_est[m] - hbar[m]).squaredNorm();
          ref = hbar[m].squaredNorm();
        } else {
          const CVec truth_iec = wh * hbar[m];
          err = (iec[m] - truth_iec).squaredNorm();
          ref = truth_iec.squaredNorm();
        }
        out_.error_energy[m] += err;
        out_.truth_energy[m] += ref;
        if (ref > 0.0) record(st, ft, m, MetricKind::nmse_empirical, err / ref);
        if (analytic && kappa[m].size() > 0) {
          if (lags.empty())
            for (int c = 0; c < m_; ++c)
              lags.push_back(ccm_lags(truth_aoa(p, c), truth_[c].angular_spread, n_, cfg_.quadrature_nodes));
          double tr_psi = cfg_.noise * kappa[m][0].real();
          double tr_r = 0.0;
          for (int c = 0; c < m_; ++c) {
            const double tr = toeplitz_trace(lags[c], kappa[m]);
            tr_psi += powers_[c] * tr;
            if (c == m) tr_r = tr;
          }
          record(st, ft, m, MetricKind::nmse_analytic, nmse_analytic_traces(tr_psi, tr_r, powers_[m], n_f));
        }
      }
      run_data_mode(st, ft, bf, hbar, iec);
      if (cfg_.tracker == TrackerKind::omp) omp_batch.stats.push_back(std::move(stats));
      if (cfg_.tracker == TrackerKind::periodogram) cov_r.noalias() += r_block * r_block.adjoint();
      ++out_.ft_completed;
    }
    if (partial) break;

    switch (cfg_.tracker) {
      case TrackerKind::ba_ml:
        for (int m = 0; m < m_; ++m)
          if (tracked[m]) estimate[m] = ba_ml(batch[m], grids[m], bf.total[m], ml_basis[m]);
        break;
      case TrackerKind::sekf:
        for (int m = 0; m < m_; ++m) {
          if (!tracked[m]) continue;
          const double floor = cfg_.noise / (powers_[m] * n_f);
          const double theta_pred = sekf[m].mean_pred[0];
          const CMat r_f = sekf_model_cov(theta_pred, bf.total[m], sekf_basis[m], floor);
          const CMat q = sekf_noise_cov(r_f, static_cast<int>(batch[m].size()));
          const CMat jac = sekf_jacobian(theta_pred, bf.total[m], sekf_basis[m]);
          sekf[m] = sekf_update(sekf[m], sekf_observe(batch[m]), q, jac, st_model, r_f);
          estimate[m] = sekf[m].aoa();
          ++out_.diagnostics.sekf_updates;
          if (sekf[m].update_skipped) ++out_.diagnostics.sekf_skipped;
          out_.diagnostics.sekf_max_imag_ratio =
              std::max(out_.diagnostics.sekf_max_imag_ratio, sekf[m].innovation_imag_ratio);
        }
        break;
      case TrackerKind::omp: {
        const OmpResult res = omp_track(omp_batch, bf.abf, grids, powers_);
        for (int m = 0; m < m_; ++m)
          if (tracked[m]) estimate[m] = res.aoa[m];
        ++out_.diagnostics.omp_calls;
        if (res.regularized) ++out_.diagnostics.omp_regularized;
        if (res.exhausted) ++out_.diagnostics.omp_exhausted;
        break;
      }
      case TrackerKind::periodogram: {
        const int w = sector.window();
        for (int m = 0; m < m_; ++m) {
          if (!tracked[m]) continue;
          const CMat s_tilde = sector.cluster_columns(m);
          const CMat cov_z = cfg_.full_dimension() ? CMat(s_tilde.adjoint() * cov_r * s_tilde)
                                                   : CMat(cov_r.block(m * w, m * w, w, w));
          estimate[m] = periodogram_track(cov_z, s_tilde, grids[m]);
        }
        break;
      }
    }
    const long next_head = (k + 1) * p_count;
    for (int m = 0; m < m_; ++m)
      if (tracked[m] && cfg_.is_metric_cluster(m))
        record(st, 0, m, MetricKind::angular_error, rad2deg(estimate[m] - truth_aoa(next_head, m)));
    ++out_.st_completed;
  }
  return std::move(out_);
}

}  // namespace

RealizationResult run_realization(const ScenarioConfig& config, int trial) {
  config.validate();
  Realization r(config, trial);
  return r.run();
}

RunResult run_experiment(const ScenarioConfig& config, int workers) {
  config.validate();
  RunResult result;
  result.config = config;
  const int n = config.trials;
  result.realizations.resize(n);
  std::vector<std::exception_ptr> errors(n);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int t = 0; t < n; ++t) {
    try {
      result.realizations[t] = run_realization(config, t);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (int t = 0; t < n; ++t)
    if (errors[t]) std::rethrow_exception(errors[t]);
  return result;
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "p") return SweepAxis::p;
  if (text == "snr") return SweepAxis::snr;
  if (text == "offset") return SweepAxis::offset;
  throw std::invalid_argument("unknown sweep axis '" + text + "' (expected p, snr or offset)");
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::p: return "p";
    case SweepAxis::snr: return "snr";
    case SweepAxis::offset: return "offset";
  }
  return "unknown";
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepAxis axis, double value) {
  ScenarioConfig c = base;
  switch (axis) {
    case SweepAxis::p: {
      const long p = std::lround(value);
      if (p < 1 || std::abs(value - p) > 1e-9) throw std::invalid_argument("sweep: P must be a positive integer");
      c.p_count = static_cast<int>(p);
      c.p_max = ((c.p_max + p - 1) / p) * p;
      break;
    }
    case SweepAxis::snr:
      if (c.clusters.empty()) throw std::invalid_argument("sweep: no clusters");
      c.clusters.front().snr_db = value;
      break;
    case SweepAxis::offset:
      if (c.mode != Mode::genie_aided) throw std::invalid_argument("sweep: offset axis needs genie_aided mode");
      c.given_angle_error_deg = value;
      break;
  }
  c.validate();
  return c;
}

std::vector<RunResult> sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values,
                             int workers) {
  std::vector<ScenarioConfig> configs;
  for (double v : values) configs.push_back(apply_sweep_value(base, axis, v));
  std::vector<RunResult> out;
  for (const auto& c : configs) out.push_back(run_experiment(c, workers));
  return out;
}

std::vector<double> metric_values(const RunResult& run, MetricKind kind, int cluster) {
  std::vector<double> v;
  for (const auto& r : run.realizations)
    for (const auto& rec : r.records)
      if (rec.kind == kind && rec.cluster == cluster) v.push_back(rec.value);
  return v;
}

double pooled_nmse(const RunResult& run, int cluster) {
  double err = 0.0, ref = 0.0;
  for (const auto& r : run.realizations) {
    err += r.error_energy[cluster];
    ref += r.truth_energy[cluster];
  }
  return ref > 0.0 ? err / ref : 0.0;
}

}  // namespace mimo
