#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimo {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Complex matrix with conjugate symmetry enforced at construction.
class HermitianMatrix {
public:
  HermitianMatrix() = default;
  // Throws if `a` is not square or departs from Hermitian by more than
  // `tol` relative to its Frobenius norm; the stored value is (a + a^H)/2.
  explicit HermitianMatrix(const CMat& a, double tol = 1e-8);

  const CMat& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

private:
  CMat m_;
};

struct EigResult {
  RVec values;   // descending
  CMat vectors;  // columns, matching `values`
};

class CholeskyError : public std::runtime_error {
public:
  CholeskyError(Eigen::Index index, double pivot);
  Eigen::Index index;
  double pivot;
};

bool all_finite(const CMat& a);

// Makes the first significant entry of every column real and positive.
void fix_column_phases(CMat& v);

EigResult hermitian_eig(const HermitianMatrix& a);

// Pencil (r, psi) with psi positive definite, reduced through psi = L L^H.
EigResult generalized_eig(const HermitianMatrix& r, const HermitianMatrix& psi);

// Thin QR; columns orthonormal, first significant entry real-positive.
CMat qr_orthonormalize(const CMat& a);

using Rng = std::mt19937_64;

// Independent stream for (master seed, trial, purpose).
Rng make_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t purpose);

CVec sample_complex_gaussian(const CVec& mean, double cov_scale, Rng& rng);
CVec sample_complex_gaussian(Eigen::Index dim, double cov_scale, Rng& rng);

struct QuadratureRule {
  RVec nodes;    // on [-1, 1]
  RVec weights;
};

const QuadratureRule& gauss_legendre_rule(int nodes);

// Fixed-node Gauss-Legendre over [a, b]; f returns any Eigen dense object.
template <class F>
auto gauss_legendre_integrate(F&& f, double a, double b, int nodes) {
  if (!(a < b) || nodes < 2) throw std::invalid_argument("gauss_legendre_integrate: need a < b and nodes >= 2");
  const QuadratureRule& q = gauss_legendre_rule(nodes);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  auto acc = f(mid + half * q.nodes[0]).eval();
  acc *= q.weights[0];
  for (int i = 1; i < nodes; ++i) acc += q.weights[i] * f(mid + half * q.nodes[i]);
  acc *= half;
  return acc;
}

}  // namespace mimo
