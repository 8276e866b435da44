#pragma once

#include "mimo/numerics.hpp"

#include <stdexcept>
#include <vector>

namespace mimo {

struct BeamformerSet {
  int n_antennas = 0;
  int n_rfc = 0;
  CMat abf;                                  // N x R
  std::vector<std::vector<int>> dft_indices; // per cluster, 1-based, window order
  std::vector<CMat> dbf;                     // per cluster, R x D_m (empty until set)
  std::vector<CMat> total;                   // per cluster, N x D_m

  int n_clusters() const { return static_cast<int>(dft_indices.size()); }
  int window() const { return n_clusters() ? static_cast<int>(dft_indices.front().size()) : 0; }
  // Columns of the ABF belonging to cluster m.
  CMat cluster_columns(int m) const { return abf.middleCols(m * window(), window()); }
  void set_dbf(int m, const CMat& w);
};

class ClusterCollision : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

CVec dft_basis(int k, int n_antennas);

// phi_k = 2 pi k / N mapped to (-pi, pi].
double dft_frequency(int k, int n_antennas);
double wrap_to_pi(double x);

// `width` circularly consecutive indices closest to pi sin(theta); ties go to
// the lower starting index.
std::vector<int> select_dft_window(double theta, int n_antennas, int width);

BeamformerSet build_abf(const std::vector<double>& aoa_estimates, int n_antennas, int n_rfc);

// Identity ABF (R = N), used by the full-dimensional beamformers.
BeamformerSet identity_abf(int n_clusters, int n_antennas);

class SectorCodebook {
public:
  explicit SectorCodebook(int n_antennas) : n_(n_antennas) {}
  int size() const { return n_; }
  // First column of the Toeplitz matrix C_k.
  CVec lags(int k) const;
  HermitianMatrix matrix(int k) const;

private:
  int n_;
};

SectorCodebook sector_codebook(int n_antennas);

struct ReducedCcms {
  std::vector<HermitianMatrix> rbar;
  HermitianMatrix psibar;
};

ReducedCcms approx_reduced_ccms(const BeamformerSet& bf, const SectorCodebook& codebook,
                                const std::vector<double>& powers, double noise);

CMat rd_geb(const HermitianMatrix& rbar, const HermitianMatrix& psibar, int d_m);
CMat fd_geb(const HermitianMatrix& r, const HermitianMatrix& psi, int d_m);

CMat dft_bf(const BeamformerSet& bf, int m);

// channels: R x M unscaled; columns are scaled by sqrt(power) inside.
CVec mmse_bf(const CMat& channels, const std::vector<double>& powers, double noise, int m);

}  // namespace mimo
