#include "mimo/tracking.hpp"

#include "mimo/beamform.hpp"

#include <omp.h>

#include <cmath>
#include <limits>

namespace mimo {

AngleGrid sector_grid(const std::vector<int>& window, int n_antennas, double resolution) {
  if (window.empty() || !(resolution > 0.0)) throw std::invalid_argument("sector_grid: empty window or resolution");
  const double bin = 2.0 * kPi / n_antennas;
  const double lo_freq = dft_frequency(window.front(), n_antennas) - 0.5 * bin;
  const double hi_freq = lo_freq + bin * static_cast<double>(window.size());
  const double lo = std::asin(std::clamp(lo_freq / kPi, -1.0, 1.0));
  const double hi = std::asin(std::clamp(hi_freq / kPi, -1.0, 1.0));
  AngleGrid g;
  g.resolution = resolution;
  const long first = static_cast<long>(std::ceil(lo / resolution - 1e-9));
  const long last = static_cast<long>(std::floor(hi / resolution + 1e-9));
  for (long i = first; i <= last; ++i) g.angles.push_back(i * resolution);
  if (g.angles.empty()) g.angles.push_back(0.5 * (lo + hi));
  return g;
}

namespace {

CMat steered_basis(double theta, const CMat& total_bf, const LowRankBasis& basis) {
  const CVec a = steering_vector(theta, static_cast<int>(total_bf.rows()));
  return total_bf.adjoint() * (a.asDiagonal() * basis.efd);
}

// Orthonormal basis for the column space of e (rank-revealing).
CMat column_space(const CMat& e) {
  Eigen::ColPivHouseholderQR<CMat> qr(e);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  CMat q = qr.householderQ() * CMat::Identity(e.rows(), rank);
  return q;
}

}  // namespace

ParametricCcm r_theta(double theta, const CMat& total_bf, const LowRankBasis& basis) {
  ParametricCcm out;
  out.e = steered_basis(theta, total_bf, basis);
  out.r = out.e * out.e.adjoint();
  return out;
}

CMat ml_projector(double theta, const CMat& total_bf, const LowRankBasis& reduced) {
  const CMat e = steered_basis(theta, total_bf, reduced);
  const CMat gram = e.adjoint() * e;
  const Eigen::Index d = e.rows();
  return CMat::Identity(d, d) - e * gram.ldlt().solve(e.adjoint());
}

CMat scatter(const std::vector<CVec>& batch) {
  if (batch.empty()) throw std::invalid_argument("scatter: empty batch");
  const Eigen::Index d = batch.front().size();
  CMat c = CMat::Zero(d, d);
  for (const CVec& h : batch) c.noalias() += h * h.adjoint();
  return c;
}

std::vector<double> ba_ml_costs(const CMat& scatter_sum, const AngleGrid& grid, const CMat& total_bf,
                                const LowRankBasis& reduced) {
  const long n = static_cast<long>(grid.angles.size());
  std::vector<double> costs(n);
  const double total = scatter_sum.trace().real();
#pragma omp parallel for schedule(static) if (n > 16)
  for (long i = 0; i < n; ++i) {
    const CMat q = column_space(steered_basis(grid.angles[i], total_bf, reduced));
    costs[i] = total - (q.adjoint() * scatter_sum * q).trace().real();
  }
  return costs;
}

namespace {
std::size_t argmin_first(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[best]) best = i;
  return best;
}
}  // namespace

double ba_ml(const std::vector<CVec>& batch, const AngleGrid& grid, const CMat& total_bf, const LowRankBasis& reduced) {
  if (batch.empty()) throw std::invalid_argument("ba_ml: empty batch");
  if (reduced.rank >= total_bf.cols()) throw std::invalid_argument("ba_ml: reduced rank must be below D_m");
  if (grid.angles.empty()) throw std::invalid_argument("ba_ml: empty grid");
  const std::vector<double> costs = ba_ml_costs(scatter(batch), grid, total_bf, reduced);
  return grid.angles[argmin_first(costs)];
}

double ba_ml_reference(const std::vector<CVec>& batch, const AngleGrid& grid, const CMat& total_bf,
                       const LowRankBasis& reduced) {
  if (batch.empty()) throw std::invalid_argument("ba_ml: empty batch");
  std::vector<double> costs(grid.angles.size());
  for (std::size_t i = 0; i < grid.angles.size(); ++i) {
    const CMat m = ml_projector(grid.angles[i], total_bf, reduced);
    double acc = 0.0;
    for (const CVec& h : batch) acc += h.dot(m * h).real();
    costs[i] = acc;
  }
  return grid.angles[argmin_first(costs)];
}

SekfState sekf_init(double aoa, double aoa_std, double velocity_std) {
  SekfState s;
  s.mean_pred = Vec2(aoa, 0.0);
  s.cov_pred = Vec2(aoa_std * aoa_std, velocity_std * velocity_std).asDiagonal();
  s.mean_filt = s.mean_pred;
  s.cov_filt = s.cov_pred;
  return s;
}

CVec sekf_observe(const std::vector<CVec>& batch) {
  const CMat c = scatter(batch) / static_cast<double>(batch.size());
  return Eigen::Map<const CVec>(c.data(), c.size());
}

CMat sekf_model_cov(double theta, const CMat& total_bf, const LowRankBasis& basis, double noise_floor) {
  CMat r = r_theta(theta, total_bf, basis).r;
  r.diagonal().array() += noise_floor;
  return r;
}

CMat sekf_noise_cov(const CMat& r_f, int p_count) {
  if (p_count < 1) throw std::invalid_argument("sekf_noise_cov: P < 1");
  const Eigen::Index d = r_f.rows();
  CMat q(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) q.block(a * d, b * d, d, d) = std::conj(r_f(a, b)) * r_f;
  return q / static_cast<double>(p_count);
}

CMat sekf_jacobian(double theta_pred, const CMat& total_bf, const LowRankBasis& basis, double step) {
  const CMat plus = r_theta(theta_pred + step, total_bf, basis).r;
  const CMat minus = r_theta(theta_pred - step, total_bf, basis).r;
  const CMat diff = (plus - minus) / (2.0 * step);
  CMat jac = CMat::Zero(diff.size(), 2);
  jac.col(0) = Eigen::Map<const CVec>(diff.data(), diff.size());
  return jac;
}

namespace {

Mat2 covariance_hygiene(const Mat2& c) {
  const Mat2 sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Mat2> es(sym);
  const Vec2 ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SekfState sekf_update(const SekfState& state, const CVec& observation, const CMat& q, const CMat& jac,
                      const std::pair<Mat2, Mat2>& st_model, const CMat& r_f_pred) {
  const Eigen::Index n = observation.size();
  if (q.rows() != n || jac.rows() != n || r_f_pred.size() != n) throw std::invalid_argument("sekf_update: dimensions");
  SekfState out = state;
  out.update_skipped = false;
  out.innovation_imag_ratio = 0.0;
  const CMat sigma = state.cov_pred.cast<cd>();
  CMat s = jac * sigma * jac.adjoint() + q;
  s = 0.5 * (s + s.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    out.update_skipped = true;
    out.mean_filt = state.mean_pred;
    out.cov_filt = state.cov_pred;
  } else {
    const Eigen::LLT<CMat> llt(s);
    // K = Sigma B^H S^{-1}
    const CMat gain = (llt.solve(jac * sigma.adjoint())).adjoint();
    const CVec innovation = observation - Eigen::Map<const CVec>(r_f_pred.data(), n);
    const CVec correction = gain * innovation;
    const double re = correction.real().norm();
    out.innovation_imag_ratio = re > 0.0 ? correction.imag().norm() / re : 0.0;
    out.mean_filt = state.mean_pred + correction.real();
    const CMat reduced = sigma - gain * jac * sigma.adjoint();
    out.cov_filt = covariance_hygiene(reduced.real());
  }
  const Mat2& a = st_model.first;
  out.mean_pred = a * out.mean_filt;
  out.cov_pred = covariance_hygiene(a * out.cov_filt * a.transpose() + st_model.second);
  return out;
}

OmpDictionary build_omp_dictionary(const CMat& abf, const std::vector<CVec>& sequences,
                                   const std::vector<AngleGrid>& grids, const std::vector<double>& powers) {
  const std::size_t m_count = sequences.size();
  if (grids.size() != m_count || powers.size() != m_count) throw std::invalid_argument("build_omp_dictionary: counts");
  const Eigen::Index r = abf.cols();
  const Eigen::Index n_f = sequences.front().size();
  Eigen::Index cols = 0;
  for (const auto& g : grids) cols += static_cast<Eigen::Index>(g.angles.size());
  OmpDictionary d;
  d.g.resize(r * n_f, cols);
  Eigen::Index c = 0;
  for (std::size_t m = 0; m < m_count; ++m) {
    for (double th : grids[m].angles) {
      const CVec beam = abf.adjoint() * steering_vector(th, static_cast<int>(abf.rows()));
      for (Eigen::Index n = 0; n < n_f; ++n) d.g.col(c).segment(n * r, r) = std::sqrt(powers[m]) * sequences[m][n] * beam;
      d.cluster.push_back(static_cast<int>(m));
      d.angle.push_back(th);
      ++c;
    }
  }
  return d;
}

namespace {

// Solves gram * y = b, adding a small ridge if the Cholesky factor fails.
CVec gram_solve(CMat gram, const CVec& b, bool& regularized) {
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success) {
    regularized = true;
    const double scale = std::max(1.0, gram.diagonal().real().maxCoeff());
    gram.diagonal().array() += 1e-10 * scale;
    llt.compute(gram);
  }
  return llt.solve(b);
}

bool all_assigned(const std::vector<bool>& assigned) {
  for (bool a : assigned)
    if (!a) return false;
  return true;
}

}  // namespace

OmpResult omp_track_reference(const CMat& f_matrix, const OmpDictionary& dict, int n_clusters) {
  OmpResult out;
  out.aoa.assign(n_clusters, 0.0);
  std::vector<bool> assigned(n_clusters, false);
  CMat residual = f_matrix;
  out.residual_norms.push_back(residual.norm());
  const Eigen::Index cols = dict.g.cols();
  while (!all_assigned(assigned) && static_cast<Eigen::Index>(out.selected.size()) < cols) {
    const CMat corr = dict.g.adjoint() * residual;
    Eigen::Index best = 0;
    double best_val = -1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = corr.row(c).squaredNorm();
      if (v > best_val) {
        best_val = v;
        best = c;
      }
    }
    const int m = dict.cluster[best];
    if (!assigned[m]) {
      assigned[m] = true;
      out.aoa[m] = dict.angle[best];
    }
    out.selected.push_back(static_cast<int>(best));
    CMat gsel(dict.g.rows(), out.selected.size());
    for (std::size_t j = 0; j < out.selected.size(); ++j) gsel.col(j) = dict.g.col(out.selected[j]);
    CMat gram = gsel.adjoint() * gsel;
    const CMat rhs = gsel.adjoint() * f_matrix;
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success) {
      out.regularized = true;
      gram.diagonal().array() += 1e-10 * std::max(1.0, gram.diagonal().real().maxCoeff());
      llt.compute(gram);
    }
    residual = f_matrix - gsel * llt.solve(rhs);
    out.residual_norms.push_back(residual.norm());
  }
  if (!all_assigned(assigned)) out.exhausted = true;
  return out;
}

OmpResult omp_track(const OmpBatch& batch, const CMat& abf, const std::vector<AngleGrid>& grids,
                    const std::vector<double>& powers) {
  const int m_count = static_cast<int>(grids.size());
  if (batch.stats.empty()) throw std::invalid_argument("omp_track: empty batch");
  if (static_cast<int>(powers.size()) != m_count) throw std::invalid_argument("omp_track: power count");
  const long p_count = static_cast<long>(batch.stats.size());

  // Beam-space steering table, one column per dictionary entry.
  std::vector<int> col_cluster;
  std::vector<double> col_angle;
  for (int m = 0; m < m_count; ++m)
    for (double th : grids[m].angles) {
      col_cluster.push_back(m);
      col_angle.push_back(th);
    }
  const long cols = static_cast<long>(col_cluster.size());
  CMat steer(abf.cols(), cols);
  for (long c = 0; c < cols; ++c) steer.col(c) = abf.adjoint() * steering_vector(col_angle[c], static_cast<int>(abf.rows()));
  const CMat steer_gram = steer.adjoint() * steer;
  RVec amp(cols);
  for (long c = 0; c < cols; ++c) amp[c] = std::sqrt(powers[col_cluster[c]]);

  // Initial correlations G_{c,p}^H F_p = sqrt(E) a_c^H x_p^{(m_c)}.
  CMat corr0(cols, p_count);
  {
    long c0 = 0;
    for (int m = 0; m < m_count; ++m) {
      const long width = static_cast<long>(grids[m].angles.size());
      CMat x(abf.cols(), p_count);
      for (long p = 0; p < p_count; ++p) x.col(p) = batch.stats[p].matched[m];
      corr0.middleRows(c0, width) = steer.middleCols(c0, width).adjoint() * x;
      corr0.middleRows(c0, width) *= std::sqrt(powers[m]);
      c0 += width;
    }
  }

  OmpResult out;
  out.aoa.assign(m_count, 0.0);
  std::vector<bool> assigned(m_count, false);
  double energy = 0.0;
  for (const auto& st : batch.stats) energy += st.energy;
  out.residual_norms.push_back(std::sqrt(energy));

  CMat corr = corr0;
  CMat coeffs;  // i x P
  while (!all_assigned(assigned) && static_cast<long>(out.selected.size()) < cols) {
    RVec row_energy(cols);
#pragma omp parallel for schedule(static) if (cols * p_count > 20000)
    for (long c = 0; c < cols; ++c) row_energy[c] = corr.row(c).squaredNorm();
    long best = 0;
    for (long c = 1; c < cols; ++c)
      if (row_energy[c] > row_energy[best]) best = c;
    const int m = col_cluster[best];
    if (!assigned[m]) {
      assigned[m] = true;
      out.aoa[m] = col_angle[best];
    }
    out.selected.push_back(static_cast<int>(best));
    const long i = static_cast<long>(out.selected.size());

    // Per-FT-CPI least squares on the selected columns.
    coeffs.resize(i, p_count);
    double residual_energy = 0.0;
    bool regularized = false;
    for (long p = 0; p < p_count; ++p) {
      const CMat& sg = batch.stats[p].seq_gram;
      CMat gram(i, i);
      CVec rhs(i);
      for (long a = 0; a < i; ++a) {
        const int ca = out.selected[a];
        rhs[a] = corr0(ca, p);
        for (long b = 0; b < i; ++b) {
          const int cb = out.selected[b];
          gram(a, b) = amp[ca] * amp[cb] * sg(col_cluster[ca], col_cluster[cb]) * steer_gram(ca, cb);
        }
      }
      const CVec y = gram_solve(gram, rhs, regularized);
      coeffs.col(p) = y;
      residual_energy += batch.stats[p].energy - rhs.dot(y).real();
    }
    out.regularized = out.regularized || regularized;
    out.residual_norms.push_back(std::sqrt(std::max(0.0, residual_energy)));

    // corr(c, p) = corr0(c, p) - sum_j G_{c,p}^H G_{t_j,p} y_{j,p}
#pragma omp parallel for schedule(static) if (cols * p_count > 20000)
    for (long c = 0; c < cols; ++c) {
      const int mc = col_cluster[c];
      for (long p = 0; p < p_count; ++p) {
        const CMat& sg = batch.stats[p].seq_gram;
        cd acc = corr0(c, p);
        for (long j = 0; j < i; ++j) {
          const int t = out.selected[j];
          acc -= amp[c] * amp[t] * sg(mc, col_cluster[t]) * steer_gram(c, t) * coeffs(j, p);
        }
        corr(c, p) = acc;
      }
    }
  }
  if (!all_assigned(assigned)) out.exhausted = true;
  return out;
}

double periodogram_track(const CMat& covariance, const CMat& s_tilde, const AngleGrid& grid) {
  if (grid.angles.empty()) throw std::invalid_argument("periodogram_track: empty grid");
  double best_val = -std::numeric_limits<double>::infinity();
  double best = grid.angles.front();
  for (double th : grid.angles) {
    const CVec v = s_tilde.adjoint() * steering_vector(th, static_cast<int>(s_tilde.rows()));
    const double val = v.dot(covariance * v).real();
    if (val > best_val) {
      best_val = val;
      best = th;
    }
  }
  return best;
}

double periodogram_track(const std::vector<CVec>& z_batch, const CMat& s_tilde, const AngleGrid& grid) {
  return periodogram_track(scatter(z_batch), s_tilde, grid);
}

}  // namespace mimo
