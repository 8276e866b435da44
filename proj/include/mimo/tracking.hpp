#pragma once

#include "mimo/channel.hpp"
#include "mimo/ft_estim.hpp"
#include "mimo/numerics.hpp"

#include <utility>
#include <vector>

namespace mimo {

enum class TrackerKind { ba_ml, sekf, omp, periodogram };

struct AngleGrid {
  std::vector<double> angles;  // rad, strictly increasing
  double resolution = 0.0;     // rad
};

// Multiples of `resolution` inside the union of the DFT sector supports of
// `window` (1-based, circularly consecutive).
AngleGrid sector_grid(const std::vector<int>& window, int n_antennas, double resolution);

struct ParametricCcm {
  CMat r;  // D_m x D_m
  CMat e;  // D_m x rank
};

ParametricCcm r_theta(double theta, const CMat& total_bf, const LowRankBasis& basis);

// I - E'(E'^H E')^{-1} E'^H at theta.
CMat ml_projector(double theta, const CMat& total_bf, const LowRankBasis& reduced);

CMat scatter(const std::vector<CVec>& batch);

// tr(M(theta) * scatter) for every grid angle.
std::vector<double> ba_ml_costs(const CMat& scatter_sum, const AngleGrid& grid, const CMat& total_bf,
                                const LowRankBasis& reduced);

// Grid search in parallel over angles.
double ba_ml(const std::vector<CVec>& batch, const AngleGrid& grid, const CMat& total_bf, const LowRankBasis& reduced);

// Serial search evaluating sum_p h_p^H M(theta) h_p with the explicit inverse.
double ba_ml_reference(const std::vector<CVec>& batch, const AngleGrid& grid, const CMat& total_bf,
                       const LowRankBasis& reduced);

struct SekfState {
  Vec2 mean_pred = Vec2::Zero();  // (k|k-1), later (k+1|k)
  Mat2 cov_pred = Mat2::Zero();
  Vec2 mean_filt = Vec2::Zero();  // (k|k)
  Mat2 cov_filt = Mat2::Zero();
  bool update_skipped = false;
  double innovation_imag_ratio = 0.0;  // |Im| / |Re| of the last state correction

  double aoa() const { return mean_pred[0]; }
};

SekfState sekf_init(double aoa, double aoa_std = deg2rad(0.5), double velocity_std = deg2rad(2.0));

CVec sekf_observe(const std::vector<CVec>& batch);

// R(theta) + noise_floor I.
CMat sekf_model_cov(double theta, const CMat& total_bf, const LowRankBasis& basis, double noise_floor);

CMat sekf_noise_cov(const CMat& r_f, int p_count);

// Column 0: central difference of vec R(theta); column 1: zero.
CMat sekf_jacobian(double theta_pred, const CMat& total_bf, const LowRankBasis& basis, double step = 1e-5);

SekfState sekf_update(const SekfState& state, const CVec& observation, const CMat& q, const CMat& jac,
                      const std::pair<Mat2, Mat2>& st_model, const CMat& r_f_pred);

struct OmpDictionary {
  CMat g;                     // (R N_F) x (sum of grid sizes)
  std::vector<int> cluster;   // per column
  std::vector<double> angle;  // per column, rad
};

OmpDictionary build_omp_dictionary(const CMat& abf, const std::vector<CVec>& sequences,
                                   const std::vector<AngleGrid>& grids, const std::vector<double>& powers);

struct OmpResult {
  std::vector<double> aoa;             // per cluster
  std::vector<int> selected;           // dictionary columns in selection order
  std::vector<double> residual_norms;  // Frobenius norm of the residual, before and after each step
  bool regularized = false;
  bool exhausted = false;              // a cluster never won; fell back to its best column
};

// Dense version with one dictionary for every column of f_matrix.
OmpResult omp_track_reference(const CMat& f_matrix, const OmpDictionary& dict, int n_clusters);

// Training statistics of one ST-CPI; sequences may change per FT-CPI.
struct OmpBatch {
  std::vector<TrainingStats> stats;  // one per FT-CPI
};

// Same selection rule as the reference, evaluated through the matched
// statistics and per-FT-CPI Gram matrices; parallel over dictionary columns.
OmpResult omp_track(const OmpBatch& batch, const CMat& abf, const std::vector<AngleGrid>& grids,
                    const std::vector<double>& powers);

// covariance: sum of z z^H over the training symbols of the batch (width x width).
double periodogram_track(const CMat& covariance, const CMat& s_tilde, const AngleGrid& grid);
double periodogram_track(const std::vector<CVec>& z_batch, const CMat& s_tilde, const AngleGrid& grid);

}  // namespace mimo
