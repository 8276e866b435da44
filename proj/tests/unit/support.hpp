#pragma once

#include "mimo/numerics.hpp"

#include <doctest.h>

namespace testing_support {

using namespace mimo;

inline CMat random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = cd(g(rng), g(rng));
  return a;
}

// Positive definite when ridge > 0.
inline HermitianMatrix random_psd(Eigen::Index dim, Rng& rng, double ridge = 0.0, Eigen::Index rank = -1) {
  const CMat b = random_matrix(dim, rank < 0 ? dim : rank, rng);
  CMat a = b * b.adjoint();
  a.diagonal().array() += ridge;
  return HermitianMatrix(a);
}

inline double rel_frob(const CMat& a, const CMat& ref) { return (a - ref).norm() / ref.norm(); }

// Brute-force midpoint rule for the CCM: (1/spread) * int a(t) a(t)^H dt.
inline CMat midpoint_ccm(double theta, double spread, int n, int points) {
  CMat r = CMat::Zero(n, n);
  for (int i = 0; i < points; ++i) {
    const double t = theta - 0.5 * spread + (i + 0.5) * spread / points;
    CVec a(n);
    for (int k = 0; k < n; ++k) a[k] = std::polar(1.0 / std::sqrt(double(n)), kPi * k * std::sin(t));
    r += a * a.adjoint();
  }
  return r / points;
}

}  // namespace testing_support
