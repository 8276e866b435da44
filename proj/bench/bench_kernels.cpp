// OpenMP kernels against their serial references.

#include "mimo/beamform.hpp"
#include "mimo/channel.hpp"
#include "mimo/config.hpp"
#include "mimo/ft_estim.hpp"
#include "mimo/simulation.hpp"
#include "mimo/tracking.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace mimo;

namespace {

std::vector<double> table_iv_aoas() { return {deg2rad(10), deg2rad(20), deg2rad(-10), deg2rad(-20)}; }
const std::vector<double> kPowers = {1e1, 1e4, 1e3, 1e3};

struct TrackingFixture {
  BeamformerSet bf = build_abf(table_iv_aoas(), 128, 16);
  LowRankBasis reduced = lowrank_basis(deg2rad(3), 128, 2);
  std::vector<AngleGrid> grids;
  std::vector<CVec> iec_batch;
  std::vector<CVec> sequences;
  OmpBatch omp_batch;
  CMat f_matrix;

  explicit TrackingFixture(int p_count) {
    Rng rng = make_stream(1, 0, 0);
    const ReducedCcms red = approx_reduced_ccms(bf, SectorCodebook(128), kPowers, 1.0);
    for (int m = 0; m < 4; ++m) {
      bf.set_dbf(m, rd_geb(red.rbar[m], red.psibar, 3));
      grids.push_back(sector_grid(bf.dft_indices[m], 128, deg2rad(0.1)));
    }
    for (int p = 0; p < p_count; ++p) iec_batch.push_back(sample_complex_gaussian(3, 1.0, rng));
    sequences = gen_training_block(4, 10, rng).sequences;
    f_matrix.resize(160, p_count);
    for (int p = 0; p < p_count; ++p) {
      CMat block = Eigen::Map<const CMat>(sample_complex_gaussian(160, 1.0, rng).data(), 16, 10);
      for (int m = 0; m < 4; ++m) {
        const ClusterTruth c{table_iv_aoas()[m], 0, deg2rad(3), kPowers[m], 0, m};
        block += std::sqrt(kPowers[m]) * (bf.abf.adjoint() * draw_channel(c, 128, 100, rng)) * sequences[m].transpose();
      }
      f_matrix.col(p) = Eigen::Map<const CVec>(block.data(), block.size());
      omp_batch.stats.push_back(training_stats(block, sequences));
    }
  }
};

void BM_BaMl(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  TrackingFixture f(1000);
  for (auto _ : state) benchmark::DoNotOptimize(ba_ml(f.iec_batch, f.grids[0], f.bf.total[0], f.reduced));
}
BENCHMARK(BM_BaMl)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BaMlReference(benchmark::State& state) {
  TrackingFixture f(1000);
  for (auto _ : state) benchmark::DoNotOptimize(ba_ml_reference(f.iec_batch, f.grids[0], f.bf.total[0], f.reduced));
}
BENCHMARK(BM_BaMlReference)->Unit(benchmark::kMillisecond);

void BM_Omp(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  TrackingFixture f(100);
  for (auto _ : state) benchmark::DoNotOptimize(omp_track(f.omp_batch, f.bf.abf, f.grids, kPowers).aoa);
}
BENCHMARK(BM_Omp)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_OmpReference(benchmark::State& state) {
  TrackingFixture f(100);
  const OmpDictionary dict = build_omp_dictionary(f.bf.abf, f.sequences, f.grids, kPowers);
  for (auto _ : state) benchmark::DoNotOptimize(omp_track_reference(f.f_matrix, dict, 4).aoa);
}
BENCHMARK(BM_OmpReference)->Unit(benchmark::kMillisecond);

// CCM through its Toeplitz lags against the dense outer-product quadrature.
void BM_CcmLags(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cluster_ccm(deg2rad(10), deg2rad(3), 128, 64));
}
BENCHMARK(BM_CcmLags)->Unit(benchmark::kMicrosecond);

void BM_CcmOuterQuadrature(benchmark::State& state) {
  auto outer = [](double t) {
    const CVec a = steering_vector(t, 128);
    return CMat(a * a.adjoint());
  };
  const double lo = deg2rad(8.5), hi = deg2rad(11.5);
  for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre_integrate(outer, lo, hi, 64));
}
BENCHMARK(BM_CcmOuterQuadrature)->Unit(benchmark::kMicrosecond);

struct MmseFixture {
  TrainingStats stats;
  std::vector<HermitianMatrix> blocks;
  JointMmsePrior prior;

  explicit MmseFixture(int n) {
    Rng rng = make_stream(2, 0, 0);
    const auto seqs = gen_training_block(4, 10, rng).sequences;
    for (double a : table_iv_aoas()) blocks.push_back(cluster_ccm(a, deg2rad(3), n, 64));
    stats = training_stats(Eigen::Map<const CMat>(sample_complex_gaussian(n * 10, 1.0, rng).data(), n, 10), seqs);
    prior = make_joint_mmse_prior(blocks);
  }
};

void BM_JointMmseDense(benchmark::State& state) {
  MmseFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(joint_mmse(f.stats, kPowers, f.blocks, 1.0));
}
BENCHMARK(BM_JointMmseDense)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_JointMmseFactored(benchmark::State& state) {
  MmseFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(joint_mmse(f.stats, kPowers, f.prior, 1.0));
}
BENCHMARK(BM_JointMmseFactored)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

// Trial-level parallelism of the harness.
void BM_RunExperiment(benchmark::State& state) {
  ScenarioConfig c = table_iv_config();
  c.p_count = 100;
  c.p_max = 500;
  c.trials = 4;
  c.metric_clusters = {1};
  c.quadrature_nodes = 64;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c, static_cast<int>(state.range(0))).realizations.size());
}
BENCHMARK(BM_RunExperiment)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
