#include "mimo/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace mimo {

HermitianMatrix::HermitianMatrix(const CMat& a, double tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("HermitianMatrix: not square");
  if (!all_finite(a)) throw std::invalid_argument("HermitianMatrix: non-finite entry");
  const double asym = (a - a.adjoint()).norm();
  if (asym > tol * std::max(1.0, a.norm())) {
    std::ostringstream os;
    os << "HermitianMatrix: asymmetry " << asym << " exceeds tolerance";
    throw std::invalid_argument(os.str());
  }
  m_ = 0.5 * (a + a.adjoint());
}

CholeskyError::CholeskyError(Eigen::Index idx, double piv)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "matrix not positive definite: smallest pivot " << piv << " at index " << idx;
        return os.str();
      }()),
      index(idx),
      pivot(piv) {}

bool all_finite(const CMat& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

void fix_column_phases(CMat& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double peak = v.col(j).cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double mag = std::abs(v(i, j));
      if (mag > 1e-6 * peak) {
        v.col(j) *= std::conj(v(i, j)) / mag;
        v(i, j) = cd(std::abs(v(i, j)), 0.0);
        break;
      }
    }
  }
}

EigResult hermitian_eig(const HermitianMatrix& a) {
  if (a.dim() < 1) throw std::invalid_argument("hermitian_eig: empty matrix");
  Eigen::SelfAdjointEigenSolver<CMat> es(a.mat());
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: solver did not converge");
  EigResult out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  fix_column_phases(out.vectors);
  return out;
}

EigResult generalized_eig(const HermitianMatrix& r, const HermitianMatrix& psi) {
  if (r.dim() != psi.dim()) throw std::invalid_argument("generalized_eig: dimension mismatch");
  Eigen::LLT<CMat> llt(psi.mat());
  if (llt.info() != Eigen::Success) {
    Eigen::LDLT<CMat> ldlt(psi.mat());
    const RVec d = ldlt.vectorD().real();
    Eigen::Index idx = 0;
    const double piv = d.minCoeff(&idx);
    throw CholeskyError(idx, piv);
  }
  const CMat& l = llt.matrixL();
  // C = L^{-1} R L^{-H}
  CMat c = l.triangularView<Eigen::Lower>().solve(r.mat());
  c = l.triangularView<Eigen::Lower>().solve(c.adjoint().eval()).adjoint();
  EigResult std_eig = hermitian_eig(HermitianMatrix(c, 1e-6));
  EigResult out;
  out.values = std_eig.values;
  out.vectors = l.adjoint().triangularView<Eigen::Upper>().solve(std_eig.vectors);
  fix_column_phases(out.vectors);
  return out;
}

CMat qr_orthonormalize(const CMat& a) {
  if (a.rows() < a.cols()) throw std::invalid_argument("qr_orthonormalize: more columns than rows");
  Eigen::HouseholderQR<CMat> qr(a);
  const CMat& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double col_norm = a.col(j).norm();
    if (col_norm == 0.0 || !(std::abs(packed(j, j)) > 1e-12 * col_norm))
      throw std::runtime_error("qr_orthonormalize: rank deficient input");
  }
  CMat q = qr.householderQ() * CMat::Identity(a.rows(), a.cols());
  fix_column_phases(q);
  return q;
}

Rng make_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return Rng(seq);
}

CVec sample_complex_gaussian(const CVec& mean, double cov_scale, Rng& rng) {
  if (cov_scale < 0.0) throw std::invalid_argument("sample_complex_gaussian: negative variance");
  if (cov_scale == 0.0) return mean;
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 * cov_scale));
  CVec out(mean.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    out[i] = mean[i] + cd(re, im);
  }
  return out;
}

CVec sample_complex_gaussian(Eigen::Index dim, double cov_scale, Rng& rng) {
  return sample_complex_gaussian(CVec::Zero(dim), cov_scale, rng);
}

namespace {

QuadratureRule build_rule(int n) {
  QuadratureRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

}  // namespace

const QuadratureRule& gauss_legendre_rule(int nodes) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(nodes);
  if (it == cache.end()) it = cache.emplace(nodes, build_rule(nodes)).first;
  return it->second;
}

}  // namespace mimo
