#pragma once

#include "mimo/beamform.hpp"
#include "mimo/numerics.hpp"

#include <vector>

namespace mimo {

struct TrainingBlock {
  std::vector<CVec> sequences;  // per cluster, length N_F, unit modulus
};

struct IecEstimate {
  CVec vector;
  int cluster = 0;
  long ft_index = 0;
};

// Unit-modulus 4-phase symbols.
CVec gen_training(int n_f, Rng& rng);
TrainingBlock gen_training_block(int n_clusters, int n_f, Rng& rng);

struct ReceivedSymbol {
  CVec y;              // N
  CVec r;              // R
  std::vector<CVec> z; // per cluster, D_m (empty when no DBF is set)
};

ReceivedSymbol receive_symbol(const BeamformerSet& bf, const std::vector<CVec>& channels,
                              const std::vector<cd>& symbols, const std::vector<double>& powers, double noise,
                              Rng& rng);

// z_concat stacks N_F consecutive D_m-vectors.
IecEstimate ba_ls(const CVec& z_concat, const CVec& sequence, double power, int n_f, int d_m);

// r_concat stacks N_F consecutive R-vectors; result stacks M R-vectors.
CVec joint_ls(const CVec& r_concat, const std::vector<CVec>& sequences, const std::vector<double>& powers);
CVec joint_mmse(const CVec& r_concat, const std::vector<CVec>& sequences, const std::vector<double>& powers,
                const std::vector<HermitianMatrix>& rbar_blocks, double noise);

// Matched-filter statistics of one training block; all joint and
// beam-aware estimators only need these.
struct TrainingStats {
  std::vector<CVec> matched;  // per cluster: sum_n conj(s_n) r_n
  CMat seq_gram;              // (m, m') = s_m^H s_m'
  double energy = 0.0;        // sum_n |r_n|^2
};

// r_block: R x N_F, one column per training symbol.
TrainingStats training_stats(const CMat& r_block, const std::vector<CVec>& sequences);

// Per-cluster R-vector estimates.
std::vector<CVec> joint_ls(const TrainingStats& stats, const std::vector<double>& powers);
std::vector<CVec> joint_mmse(const TrainingStats& stats, const std::vector<double>& powers,
                             const std::vector<HermitianMatrix>& rbar_blocks, double noise);

// Low-rank factors of the prior blocks, Rbar_m = F_m F_m^H, for repeated joint
// MMSE solves under one prior (pivoted Cholesky; stops when the residual
// diagonal falls below rel_tol * max diagonal).
struct JointMmsePrior {
  std::vector<CMat> factors;
  std::vector<std::vector<CMat>> cross;  // F_a^H F_c
};
JointMmsePrior make_joint_mmse_prior(const std::vector<HermitianMatrix>& rbar_blocks, double rel_tol = 1e-12);

// Same estimate as the dense solve, in the span of the factors.
std::vector<CVec> joint_mmse(const TrainingStats& stats, const std::vector<double>& powers,
                             const JointMmsePrior& prior, double noise);

cd ics_cmf(const IecEstimate& estimate, const CVec& z);

std::vector<cd> dcc_align(const std::vector<cd>& symbol_stream, const IecEstimate& estimate, double power,
                          int delay);

// weights: U x M, nonzero only where user_map[m] == u.
std::vector<std::vector<cd>> dcc_combine(const std::vector<std::vector<cd>>& aligned, const RMat& weights,
                                         const std::vector<int>& user_map);

RMat dcc_equal_weights(const std::vector<int>& user_map, int n_users);

}  // namespace mimo
