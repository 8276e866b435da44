#pragma once

#include "mimo/numerics.hpp"

#include <utility>
#include <vector>

namespace mimo {

struct ClusterTruth {
  double mean_aoa = 0.0;          // rad
  double angular_velocity = 0.0;  // rad/s
  double angular_spread = 0.0;    // rad
  double power = 1.0;             // linear
  int delay = 0;                  // symbols
  int user_id = 0;

  void validate() const;
};

struct MobilityModel {
  Mat2 transition = Mat2::Identity();
  Mat2 innovation_cov = Mat2::Zero();
  double ft_duration = 0.0;

  // Variances are per FT-CPI, in rad^2 and (rad/s)^2.
  static MobilityModel make(double ft_duration, double var_aoa, double var_velocity);
};

enum class RayPlacement { equispaced, random };

CVec steering_vector(double theta, int n_antennas);

// Throws if [theta - spread/2, theta + spread/2] leaves (-pi/2, pi/2).
void check_interval(double theta, double spread);

std::vector<double> ray_angles(const ClusterTruth& c, int n_rays, RayPlacement placement, Rng& rng);

CVec draw_channel(const ClusterTruth& c, int n_antennas, int n_rays, Rng& rng,
                  RayPlacement placement = RayPlacement::equispaced);

// First column of the (Toeplitz) cluster CCM: c_l = R(l, 0), l = 0..N-1.
CVec ccm_lags(double theta, double spread, int n_antennas, int nodes = 257);
CMat toeplitz_from_lags(const CVec& lags);

HermitianMatrix cluster_ccm(double theta, double spread, int n_antennas, int nodes = 257);

RMat sinc_kernel(double spread, int n_antennas);
HermitianMatrix sinc_ccm(double theta, double spread, int n_antennas);

struct LowRankBasis {
  RMat d_matrix;
  CMat efd;  // N x rank, columns sqrt(lambda_d) e_d
  int rank = 0;
  RVec eigenvalues;  // all N eigenvalues of d_matrix, descending
};

LowRankBasis lowrank_basis(double spread, int n_antennas, int rank);

HermitianMatrix total_covariance(const std::vector<HermitianMatrix>& ccms, const std::vector<double>& powers,
                                 double noise);

Vec2 advance_mobility(const Vec2& state, const MobilityModel& model, Rng& rng);

// (A^P, sum_{i=1..P} A^i Sigma A^i^T)
std::pair<Mat2, Mat2> st_transition(const MobilityModel& model, int p_count);

}  // namespace mimo
