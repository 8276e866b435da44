#include "mimo/ft_estim.hpp"

#include <cmath>
#include <sstream>

namespace mimo {

CVec gen_training(int n_f, Rng& rng) {
  if (n_f < 1) throw std::invalid_argument("gen_training: n_f < 1");
  static const cd alphabet[4] = {std::polar(1.0, kPi / 4), std::polar(1.0, 3 * kPi / 4),
                                 std::polar(1.0, -3 * kPi / 4), std::polar(1.0, -kPi / 4)};
  std::uniform_int_distribution<int> pick(0, 3);
  CVec s(n_f);
  for (int n = 0; n < n_f; ++n) s[n] = alphabet[pick(rng)];
  return s;
}

TrainingBlock gen_training_block(int n_clusters, int n_f, Rng& rng) {
  TrainingBlock b;
  for (int m = 0; m < n_clusters; ++m) b.sequences.push_back(gen_training(n_f, rng));
  return b;
}

ReceivedSymbol receive_symbol(const BeamformerSet& bf, const std::vector<CVec>& channels,
                              const std::vector<cd>& symbols, const std::vector<double>& powers, double noise,
                              Rng& rng) {
  if (channels.size() != symbols.size() || channels.size() != powers.size())
    throw std::invalid_argument("receive_symbol: cluster count mismatch");
  ReceivedSymbol out;
  out.y = sample_complex_gaussian(bf.n_antennas, noise, rng);
  for (std::size_t m = 0; m < channels.size(); ++m) out.y += std::sqrt(powers[m]) * symbols[m] * channels[m];
  out.r = bf.abf.adjoint() * out.y;
  out.z.resize(bf.total.size());
  for (std::size_t m = 0; m < bf.total.size(); ++m)
    if (bf.dbf.size() > m && bf.dbf[m].size() > 0) out.z[m] = bf.dbf[m].adjoint() * out.r;
  return out;
}

IecEstimate ba_ls(const CVec& z_concat, const CVec& sequence, double power, int n_f, int d_m) {
  if (sequence.size() != n_f || z_concat.size() != static_cast<Eigen::Index>(n_f) * d_m)
    throw std::invalid_argument("ba_ls: size mismatch");
  if (std::abs(sequence.squaredNorm() - n_f) > 1e-9 * n_f) throw std::invalid_argument("ba_ls: |s|^2 != N_F");
  IecEstimate e;
  e.vector = CVec::Zero(d_m);
  for (int n = 0; n < n_f; ++n) e.vector += std::conj(sequence[n]) * z_concat.segment(n * d_m, d_m);
  e.vector /= std::sqrt(power) * n_f;
  return e;
}

TrainingStats training_stats(const CMat& r_block, const std::vector<CVec>& sequences) {
  const Eigen::Index n_f = r_block.cols();
  TrainingStats st;
  const int m_count = static_cast<int>(sequences.size());
  st.seq_gram.resize(m_count, m_count);
  for (int m = 0; m < m_count; ++m) {
    if (sequences[m].size() != n_f) throw std::invalid_argument("training_stats: sequence length");
    st.matched.push_back(r_block * sequences[m].conjugate());
    for (int k = 0; k < m_count; ++k) st.seq_gram(m, k) = sequences[m].dot(sequences[k]);
  }
  st.energy = r_block.squaredNorm();
  return st;
}

namespace {

CMat weighted_gram(const TrainingStats& st, const std::vector<double>& powers) {
  const Eigen::Index m_count = st.seq_gram.rows();
  if (static_cast<Eigen::Index>(powers.size()) != m_count) throw std::invalid_argument("joint estimator: power count");
  CMat g = st.seq_gram;
  for (Eigen::Index a = 0; a < m_count; ++a)
    for (Eigen::Index b = 0; b < m_count; ++b) g(a, b) *= std::sqrt(powers[a] * powers[b]);
  return g;
}

// Columns: V^H r split per cluster.
CMat projected_observation(const TrainingStats& st, const std::vector<double>& powers) {
  const Eigen::Index r = st.matched.front().size();
  CMat b(r, st.matched.size());
  for (std::size_t m = 0; m < st.matched.size(); ++m) b.col(m) = std::sqrt(powers[m]) * st.matched[m];
  return b;
}

TrainingStats stats_from_concat(const CVec& r_concat, const std::vector<CVec>& sequences) {
  if (sequences.empty()) throw std::invalid_argument("joint estimator: no sequences");
  const Eigen::Index n_f = sequences.front().size();
  if (n_f == 0 || r_concat.size() % n_f != 0) throw std::invalid_argument("joint estimator: length mismatch");
  const Eigen::Index r = r_concat.size() / n_f;
  return training_stats(Eigen::Map<const CMat>(r_concat.data(), r, n_f), sequences);
}

CVec stack(const std::vector<CVec>& parts) {
  Eigen::Index total = 0;
  for (const auto& p : parts) total += p.size();
  CVec out(total);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    out.segment(off, p.size()) = p;
    off += p.size();
  }
  return out;
}

}  // namespace

std::vector<CVec> joint_ls(const TrainingStats& stats, const std::vector<double>& powers) {
  const CMat g = weighted_gram(stats, powers);
  Eigen::FullPivLU<CMat> lu(g);
  if (!lu.isInvertible()) throw std::runtime_error("joint_ls: singular sequence Gram matrix");
  // (G kron I) vec(X) = vec(B)  <=>  G X^T = B^T
  const CMat b = projected_observation(stats, powers);
  const CMat x = lu.solve(b.transpose()).transpose();
  std::vector<CVec> out;
  for (Eigen::Index m = 0; m < x.cols(); ++m) out.push_back(x.col(m));
  return out;
}

std::vector<CVec> joint_mmse(const TrainingStats& stats, const std::vector<double>& powers,
                             const std::vector<HermitianMatrix>& rbar_blocks, double noise) {
  if (!(noise > 0.0)) throw std::invalid_argument("joint_mmse: noise must be positive");
  const CMat g = weighted_gram(stats, powers);
  const Eigen::Index m_count = g.rows();
  const Eigen::Index r = stats.matched.front().size();
  if (static_cast<Eigen::Index>(rbar_blocks.size()) != m_count) throw std::invalid_argument("joint_mmse: block count");
  // (Rbar (G kron I) + N0 I) x = Rbar V^H r
  CMat sys(m_count * r, m_count * r);
  CVec rhs(m_count * r);
  const CMat b = projected_observation(stats, powers);
  for (Eigen::Index a = 0; a < m_count; ++a) {
    const CMat& ra = rbar_blocks[a].mat();
    if (ra.rows() != r) throw std::invalid_argument("joint_mmse: block dimension");
    for (Eigen::Index c = 0; c < m_count; ++c) sys.block(a * r, c * r, r, r) = ra * g(a, c);
    rhs.segment(a * r, r) = ra * b.col(a);
  }
  sys.diagonal().array() += noise;
  const CVec x = sys.partialPivLu().solve(rhs);
  std::vector<CVec> out;
  for (Eigen::Index m = 0; m < m_count; ++m) out.push_back(x.segment(m * r, r));
  return out;
}

JointMmsePrior make_joint_mmse_prior(const std::vector<HermitianMatrix>& rbar_blocks, double rel_tol) {
  JointMmsePrior prior;
  for (const auto& blk : rbar_blocks) {
    // Pivoted Cholesky, stopped once the residual diagonal is negligible.
    const CMat& a = blk.mat();
    const Eigen::Index n = a.rows();
    RVec resid = a.diagonal().real();
    const double stop = rel_tol * std::max(resid.maxCoeff(), 0.0);
    CMat f(n, 0);
    while (f.cols() < n) {
      Eigen::Index piv;
      const double top = resid.maxCoeff(&piv);
      if (!(top > stop)) break;
      CVec col = a.col(piv);
      if (f.cols() > 0) col -= f * f.row(piv).adjoint();
      col /= std::sqrt(top);
      f.conservativeResize(Eigen::NoChange, f.cols() + 1);
      f.col(f.cols() - 1) = col;
      resid -= col.cwiseAbs2();
      resid[piv] = 0.0;
    }
    prior.factors.push_back(std::move(f));
  }
  const std::size_t m = prior.factors.size();
  prior.cross.assign(m, std::vector<CMat>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t c = 0; c < m; ++c) prior.cross[a][c] = prior.factors[a].adjoint() * prior.factors[c];
  return prior;
}

std::vector<CVec> joint_mmse(const TrainingStats& stats, const std::vector<double>& powers,
                             const JointMmsePrior& prior, double noise) {
  if (!(noise > 0.0)) throw std::invalid_argument("joint_mmse: noise must be positive");
  const CMat g = weighted_gram(stats, powers);
  const Eigen::Index m_count = g.rows();
  if (static_cast<Eigen::Index>(prior.factors.size()) != m_count) throw std::invalid_argument("joint_mmse: block count");
  // x = F (F^H (G kron I) F + N0 I)^{-1} F^H V^H r with Rbar = F F^H.
  std::vector<Eigen::Index> offset(m_count + 1, 0);
  for (Eigen::Index a = 0; a < m_count; ++a) offset[a + 1] = offset[a] + prior.factors[a].cols();
  const Eigen::Index dim = offset[m_count];
  const CMat b = projected_observation(stats, powers);
  CMat sys(dim, dim);
  CVec rhs(dim);
  for (Eigen::Index a = 0; a < m_count; ++a) {
    const Eigen::Index ka = prior.factors[a].cols();
    for (Eigen::Index c = 0; c < m_count; ++c)
      sys.block(offset[a], offset[c], ka, prior.factors[c].cols()) = g(a, c) * prior.cross[a][c];
    rhs.segment(offset[a], ka) = prior.factors[a].adjoint() * b.col(a);
  }
  sys.diagonal().array() += noise;
  const CVec y = sys.llt().solve(rhs);
  std::vector<CVec> out;
  for (Eigen::Index a = 0; a < m_count; ++a)
    out.push_back(prior.factors[a] * y.segment(offset[a], prior.factors[a].cols()));
  return out;
}

CVec joint_ls(const CVec& r_concat, const std::vector<CVec>& sequences, const std::vector<double>& powers) {
  return stack(joint_ls(stats_from_concat(r_concat, sequences), powers));
}

CVec joint_mmse(const CVec& r_concat, const std::vector<CVec>& sequences, const std::vector<double>& powers,
                const std::vector<HermitianMatrix>& rbar_blocks, double noise) {
  return stack(joint_mmse(stats_from_concat(r_concat, sequences), powers, rbar_blocks, noise));
}

cd ics_cmf(const IecEstimate& estimate, const CVec& z) {
  if (estimate.vector.size() != z.size()) throw std::invalid_argument("ics_cmf: dimension mismatch");
  return estimate.vector.dot(z);
}

std::vector<cd> dcc_align(const std::vector<cd>& symbol_stream, const IecEstimate& estimate, double power,
                          int delay) {
  const double gain = estimate.vector.squaredNorm();
  if (!(gain > 0.0)) throw std::invalid_argument("dcc_align: zero channel estimate");
  if (delay < 0) throw std::invalid_argument("dcc_align: negative delay");
  const double scale = 1.0 / (std::sqrt(power) * gain);
  std::vector<cd> out;
  for (std::size_t n = static_cast<std::size_t>(delay); n < symbol_stream.size(); ++n)
    out.push_back(symbol_stream[n] * scale);
  return out;
}

std::vector<std::vector<cd>> dcc_combine(const std::vector<std::vector<cd>>& aligned, const RMat& weights,
                                         const std::vector<int>& user_map) {
  const Eigen::Index m_count = static_cast<Eigen::Index>(aligned.size());
  if (weights.cols() != m_count || static_cast<Eigen::Index>(user_map.size()) != m_count)
    throw std::invalid_argument("dcc_combine: cluster count mismatch");
  for (Eigen::Index u = 0; u < weights.rows(); ++u)
    for (Eigen::Index m = 0; m < m_count; ++m)
      if (weights(u, m) != 0.0 && user_map[m] != u) {
        std::ostringstream os;
        os << "dcc_combine: weight for cluster " << m + 1 << " on user " << u + 1 << " violates the user map";
        throw std::invalid_argument(os.str());
      }
  std::vector<std::vector<cd>> out(weights.rows());
  for (Eigen::Index u = 0; u < weights.rows(); ++u) {
    std::size_t len = 0;
    bool first = true;
    for (Eigen::Index m = 0; m < m_count; ++m)
      if (user_map[m] == u) {
        len = first ? aligned[m].size() : std::min(len, aligned[m].size());
        first = false;
      }
    out[u].assign(len, cd(0.0, 0.0));
    for (Eigen::Index m = 0; m < m_count; ++m)
      if (user_map[m] == u)
        for (std::size_t n = 0; n < len; ++n) out[u][n] += weights(u, m) * aligned[m][n];
  }
  return out;
}

RMat dcc_equal_weights(const std::vector<int>& user_map, int n_users) {
  RMat w = RMat::Zero(n_users, user_map.size());
  for (int u = 0; u < n_users; ++u) {
    int count = 0;
    for (int id : user_map) count += id == u;
    for (std::size_t m = 0; m < user_map.size(); ++m)
      if (user_map[m] == u) w(u, m) = 1.0 / count;
  }
  return w;
}

}  // namespace mimo
