#include "mimo/channel.hpp"

#include <cmath>
#include <sstream>

namespace mimo {

void ClusterTruth::validate() const {
  if (!(std::abs(mean_aoa) < kPi / 2)) throw std::invalid_argument("ClusterTruth: |mean_aoa| must be below pi/2");
  if (!(angular_spread > 0.0)) throw std::invalid_argument("ClusterTruth: angular_spread must be positive");
  if (!(power > 0.0)) throw std::invalid_argument("ClusterTruth: power must be positive");
  if (delay < 0) throw std::invalid_argument("ClusterTruth: negative delay");
}

MobilityModel MobilityModel::make(double ft_duration, double var_aoa, double var_velocity) {
  if (var_aoa < 0.0 || var_velocity < 0.0) throw std::invalid_argument("MobilityModel: negative variance");
  MobilityModel m;
  m.ft_duration = ft_duration;
  m.transition << 1.0, ft_duration, 0.0, 1.0;
  m.innovation_cov << var_aoa, 0.0, 0.0, var_velocity;
  return m;
}

CVec steering_vector(double theta, int n_antennas) {
  if (n_antennas < 1) throw std::invalid_argument("steering_vector: n_antennas < 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
  const double phase = kPi * std::sin(theta);
  CVec a(n_antennas);
  for (int k = 0; k < n_antennas; ++k) a[k] = std::polar(scale, phase * k);
  return a;
}

void check_interval(double theta, double spread) {
  if (!(spread > 0.0)) throw std::invalid_argument("cluster interval: spread must be positive");
  if (!(theta - 0.5 * spread > -kPi / 2 && theta + 0.5 * spread < kPi / 2)) {
    std::ostringstream os;
    os << "cluster interval around " << rad2deg(theta) << " deg crosses +-90 deg";
    throw std::invalid_argument(os.str());
  }
}

std::vector<double> ray_angles(const ClusterTruth& c, int n_rays, RayPlacement placement, Rng& rng) {
  if (n_rays < 1) throw std::invalid_argument("ray_angles: n_rays < 1");
  check_interval(c.mean_aoa, c.angular_spread);
  std::vector<double> out(n_rays);
  const double lo = c.mean_aoa - 0.5 * c.angular_spread;
  if (placement == RayPlacement::equispaced) {
    for (int l = 0; l < n_rays; ++l) out[l] = lo + (l + 0.5) * c.angular_spread / n_rays;
  } else {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int l = 0; l < n_rays; ++l) out[l] = lo + u(rng) * c.angular_spread;
  }
  return out;
}

CVec draw_channel(const ClusterTruth& c, int n_antennas, int n_rays, Rng& rng, RayPlacement placement) {
  const std::vector<double> angles = ray_angles(c, n_rays, placement, rng);
  const CVec gains = sample_complex_gaussian(n_rays, 1.0, rng);
  // h[k] = sum_l g_l z_l^k / sqrt(L N), evaluated by running powers.
  CVec step(n_rays);
  CVec cur = gains / std::sqrt(static_cast<double>(n_rays) * n_antennas);
  for (int l = 0; l < n_rays; ++l) step[l] = std::polar(1.0, kPi * std::sin(angles[l]));
  CVec h(n_antennas);
  for (int k = 0; k < n_antennas; ++k) {
    h[k] = cur.sum();
    cur = cur.cwiseProduct(step);
  }
  return h;
}

CVec ccm_lags(double theta, double spread, int n_antennas, int nodes) {
  check_interval(theta, spread);
  const QuadratureRule& q = gauss_legendre_rule(nodes);
  CVec step(nodes);
  CVec cur(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double t = theta + 0.5 * spread * q.nodes[i];
    step[i] = std::polar(1.0, kPi * std::sin(t));
    // (1/spread) * (spread/2) * w_i / N
    cur[i] = 0.5 * q.weights[i] / n_antennas;
  }
  CVec lags(n_antennas);
  for (int l = 0; l < n_antennas; ++l) {
    lags[l] = cur.sum();
    cur = cur.cwiseProduct(step);
  }
  return lags;
}

CMat toeplitz_from_lags(const CVec& lags) {
  const Eigen::Index n = lags.size();
  CMat r(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) r(i, j) = i >= j ? lags[i - j] : std::conj(lags[j - i]);
  return r;
}

HermitianMatrix cluster_ccm(double theta, double spread, int n_antennas, int nodes) {
  return HermitianMatrix(toeplitz_from_lags(ccm_lags(theta, spread, n_antennas, nodes)));
}

namespace {
double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}
}  // namespace

RMat sinc_kernel(double spread, int n_antennas) {
  RMat d(n_antennas, n_antennas);
  const double s = std::sin(0.5 * spread);
  for (int b = 0; b < n_antennas; ++b)
    for (int a = 0; a < n_antennas; ++a) d(a, b) = sinc((a - b) * s);
  return d;
}

HermitianMatrix sinc_ccm(double theta, double spread, int n_antennas) {
  check_interval(theta, spread);
  const CVec a = steering_vector(theta, n_antennas);
  const RMat d = sinc_kernel(spread, n_antennas);
  CMat r = a.asDiagonal() * d.cast<cd>() * a.conjugate().asDiagonal();
  return HermitianMatrix(r);
}

LowRankBasis lowrank_basis(double spread, int n_antennas, int rank) {
  if (rank < 1 || rank > n_antennas) throw std::invalid_argument("lowrank_basis: rank out of range");
  LowRankBasis out;
  out.d_matrix = sinc_kernel(spread, n_antennas);
  Eigen::SelfAdjointEigenSolver<RMat> es(out.d_matrix);
  out.eigenvalues = es.eigenvalues().reverse();
  const RMat vecs = es.eigenvectors().rowwise().reverse();
  out.rank = rank;
  out.efd.resize(n_antennas, rank);
  for (int d = 0; d < rank; ++d) {
    RVec v = vecs.col(d);
    // deterministic sign: first significant entry positive
    for (int i = 0; i < n_antennas; ++i)
      if (std::abs(v[i]) > 1e-6 * v.cwiseAbs().maxCoeff()) {
        if (v[i] < 0) v = -v;
        break;
      }
    out.efd.col(d) = (std::sqrt(std::max(0.0, out.eigenvalues[d])) * v).cast<cd>();
  }
  return out;
}

HermitianMatrix total_covariance(const std::vector<HermitianMatrix>& ccms, const std::vector<double>& powers,
                                 double noise) {
  if (ccms.empty() || ccms.size() != powers.size()) throw std::invalid_argument("total_covariance: size mismatch");
  const Eigen::Index n = ccms.front().dim();
  CMat psi = noise * CMat::Identity(n, n);
  for (std::size_t m = 0; m < ccms.size(); ++m) {
    if (ccms[m].dim() != n) throw std::invalid_argument("total_covariance: dimension mismatch");
    psi += powers[m] * ccms[m].mat();
  }
  return HermitianMatrix(psi);
}

Vec2 advance_mobility(const Vec2& state, const MobilityModel& model, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec2 nu(g(rng), g(rng));
  if (model.innovation_cov.isZero(0.0)) {
    nu.setZero();
  } else if (model.innovation_cov(0, 1) == 0.0 && model.innovation_cov(1, 0) == 0.0) {
    nu[0] *= std::sqrt(model.innovation_cov(0, 0));
    nu[1] *= std::sqrt(model.innovation_cov(1, 1));
  } else {
    nu = Mat2(Eigen::LLT<Mat2>(model.innovation_cov).matrixL()) * nu;
  }
  return model.transition * state + nu;
}

std::pair<Mat2, Mat2> st_transition(const MobilityModel& model, int p_count) {
  if (p_count < 1) throw std::invalid_argument("st_transition: P < 1");
  const double t = model.ft_duration;
  const double p = p_count;
  const double s1 = p * (p + 1.0) / 2.0;
  const double s2 = p * (p + 1.0) * (2.0 * p + 1.0) / 6.0;
  const Mat2& s = model.innovation_cov;
  const double a = s(0, 0), b = 0.5 * (s(0, 1) + s(1, 0)), c = s(1, 1);
  Mat2 ap;
  ap << 1.0, p * t, 0.0, 1.0;
  Mat2 sum;
  sum(0, 0) = p * a + 2.0 * t * b * s1 + t * t * c * s2;
  sum(0, 1) = p * b + t * c * s1;
  sum(1, 0) = sum(0, 1);
  sum(1, 1) = p * c;
  return {ap, sum};
}

}  // namespace mimo
