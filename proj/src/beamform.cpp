#include "mimo/beamform.hpp"

#include "mimo/channel.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace mimo {

void BeamformerSet::set_dbf(int m, const CMat& w) {
  if (w.rows() != abf.cols()) throw std::invalid_argument("set_dbf: row count must equal R");
  if (dbf.size() < dft_indices.size()) {
    dbf.resize(dft_indices.size());
    total.resize(dft_indices.size());
  }
  dbf[m] = w;
  total[m] = abf * w;
}

CVec dft_basis(int k, int n_antennas) {
  if (k < 1 || k > n_antennas) throw std::invalid_argument("dft_basis: index out of range");
  const double phi = 2.0 * kPi * k / n_antennas;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
  CVec u(n_antennas);
  for (int n = 0; n < n_antennas; ++n) u[n] = std::polar(scale, phi * n);
  return u;
}

double wrap_to_pi(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

double dft_frequency(int k, int n_antennas) { return wrap_to_pi(2.0 * kPi * k / n_antennas); }

std::vector<int> select_dft_window(double theta, int n_antennas, int width) {
  if (width < 1 || width > n_antennas) throw std::invalid_argument("select_dft_window: bad width");
  if (!(std::abs(theta) < kPi / 2)) throw std::invalid_argument("select_dft_window: estimate outside (-90, 90) deg");
  const double psi = kPi * std::sin(theta);
  std::vector<double> dist(n_antennas);
  for (int k = 1; k <= n_antennas; ++k) dist[k - 1] = std::abs(wrap_to_pi(2.0 * kPi * k / n_antennas - psi));
  int best = 1;
  double best_cost = 0.0;
  for (int start = 1; start <= n_antennas; ++start) {
    double cost = 0.0;
    for (int r = 0; r < width; ++r) cost += dist[(start - 1 + r) % n_antennas];
    if (start == 1 || cost < best_cost - 1e-12) {
      best = start;
      best_cost = cost;
    }
  }
  std::vector<int> out(width);
  for (int r = 0; r < width; ++r) out[r] = (best - 1 + r) % n_antennas + 1;
  return out;
}

BeamformerSet build_abf(const std::vector<double>& aoa_estimates, int n_antennas, int n_rfc) {
  const int m_count = static_cast<int>(aoa_estimates.size());
  if (m_count < 1) throw std::invalid_argument("build_abf: no clusters");
  if (n_rfc % m_count != 0) throw std::invalid_argument("build_abf: R must be divisible by M");
  if (n_rfc > n_antennas) throw std::invalid_argument("build_abf: R exceeds N");
  const int width = n_rfc / m_count;
  BeamformerSet bf;
  bf.n_antennas = n_antennas;
  bf.n_rfc = n_rfc;
  bf.abf.resize(n_antennas, n_rfc);
  std::set<int> used;
  for (int m = 0; m < m_count; ++m) {
    std::vector<int> w = select_dft_window(aoa_estimates[m], n_antennas, width);
    for (int r = 0; r < width; ++r) {
      if (!used.insert(w[r]).second) {
        std::ostringstream os;
        os << "cluster collision: DFT index " << w[r] << " requested twice (cluster " << m + 1 << ")";
        throw ClusterCollision(os.str());
      }
      bf.abf.col(m * width + r) = dft_basis(w[r], n_antennas);
    }
    bf.dft_indices.push_back(std::move(w));
  }
  bf.dbf.resize(m_count);
  bf.total.resize(m_count);
  return bf;
}

BeamformerSet identity_abf(int n_clusters, int n_antennas) {
  BeamformerSet bf;
  bf.n_antennas = n_antennas;
  bf.n_rfc = n_antennas;
  bf.abf = CMat::Identity(n_antennas, n_antennas);
  bf.dft_indices.assign(n_clusters, {});
  bf.dbf.resize(n_clusters);
  bf.total.resize(n_clusters);
  return bf;
}

CVec SectorCodebook::lags(int k) const {
  if (k < 1 || k > n_) throw std::invalid_argument("SectorCodebook: index out of range");
  const double phi = 2.0 * kPi * k / n_;
  CVec c(n_);
  c[0] = 1.0 / n_;
  for (int l = 1; l < n_; ++l) c[l] = std::polar(std::sin(kPi * l / n_) / (kPi * l), phi * l);
  return c;
}

HermitianMatrix SectorCodebook::matrix(int k) const { return HermitianMatrix(toeplitz_from_lags(lags(k))); }

SectorCodebook sector_codebook(int n_antennas) {
  if (n_antennas < 1) throw std::invalid_argument("sector_codebook: n_antennas < 1");
  return SectorCodebook(n_antennas);
}

ReducedCcms approx_reduced_ccms(const BeamformerSet& bf, const SectorCodebook& codebook,
                                const std::vector<double>& powers, double noise) {
  const int m_count = bf.n_clusters();
  if (static_cast<int>(powers.size()) != m_count) throw std::invalid_argument("approx_reduced_ccms: power count");
  if (codebook.size() != bf.n_antennas) throw std::invalid_argument("approx_reduced_ccms: codebook size");
  const int r = bf.n_rfc;
  const double scale = static_cast<double>(m_count) / r;
  ReducedCcms out;
  CMat psibar = noise * CMat::Identity(r, r);
  for (int m = 0; m < m_count; ++m) {
    if (bf.dft_indices[m].empty()) throw std::invalid_argument("approx_reduced_ccms: DFT indices missing");
    CVec lags = CVec::Zero(bf.n_antennas);
    for (int k : bf.dft_indices[m]) lags += codebook.lags(k);
    lags *= scale;
    const CMat full = toeplitz_from_lags(lags);
    const CMat reduced = bf.abf.adjoint() * (full * bf.abf);
    out.rbar.emplace_back(reduced);
    psibar += powers[m] * out.rbar.back().mat();
  }
  out.psibar = HermitianMatrix(psibar);
  return out;
}

namespace {
CMat top_generalized(const HermitianMatrix& r, const HermitianMatrix& psi, int d_m) {
  if (d_m < 1 || d_m > r.dim()) throw std::invalid_argument("GEB: D_m out of range");
  const EigResult eg = generalized_eig(r, psi);
  return qr_orthonormalize(eg.vectors.leftCols(d_m));
}
}  // namespace

CMat rd_geb(const HermitianMatrix& rbar, const HermitianMatrix& psibar, int d_m) {
  return top_generalized(rbar, psibar, d_m);
}

CMat fd_geb(const HermitianMatrix& r, const HermitianMatrix& psi, int d_m) { return top_generalized(r, psi, d_m); }

CMat dft_bf(const BeamformerSet& bf, int m) {
  if (m < 0 || m >= bf.n_clusters() || bf.dft_indices[m].empty())
    throw std::invalid_argument("dft_bf: cluster without DFT indices");
  const int w = bf.window();
  CMat sel = CMat::Zero(bf.n_rfc, w);
  for (int r = 0; r < w; ++r) sel(m * w + r, r) = 1.0;
  return sel;
}

CVec mmse_bf(const CMat& channels, const std::vector<double>& powers, double noise, int m) {
  if (!(noise > 0.0)) throw std::invalid_argument("mmse_bf: noise must be positive");
  if (channels.cols() != static_cast<Eigen::Index>(powers.size())) throw std::invalid_argument("mmse_bf: power count");
  CMat scaled = channels;
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) scaled.col(c) *= std::sqrt(powers[c]);
  CMat gram = scaled * scaled.adjoint();
  gram.diagonal().array() += noise;
  return gram.llt().solve(channels.col(m));
}

}  // namespace mimo
