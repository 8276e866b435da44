#pragma once

#include "mimo/ft_estim.hpp"
#include "mimo/numerics.hpp"

#include <vector>

namespace mimo {

enum class MetricKind { nmse_analytic, nmse_empirical, sinr, angular_error };

const char* metric_name(MetricKind k);

struct MetricRecord {
  int trial = 0;
  int st_index = 0;   // 1-based
  long ft_index = 0;  // 1-based; 0 for per-ST-CPI records
  int cluster = 0;    // 0-based internally, 1-based in reports
  MetricKind kind = MetricKind::sinr;
  double value = 0.0;  // NMSE linear, SINR dB, angular error deg
};

double nmse_analytic(const CMat& psi_tilde, const CMat& r_tilde, double power, int n_f);

// Trace-only form: tr(Psi~) and tr(R~) are all that is needed.
double nmse_analytic_traces(double trace_psi_tilde, double trace_r_tilde, double power, int n_f);

double nmse_empirical(const std::vector<IecEstimate>& estimates, const std::vector<CVec>& truths);

double angular_rmse(const std::vector<double>& estimates, const std::vector<double>& truths);

// Per-FT-CPI SINR: |S|^2 and |N|^2 are summed separately, then ratioed.
class SinrAccumulator {
public:
  // s_hat: combiner output; signal: sqrt(E) h^H h s.
  void add(cd s_hat, cd signal);
  long count() const { return count_; }
  double linear() const;
  double db() const;  // capped at +200 dB

private:
  double signal_ = 0.0;
  double noise_ = 0.0;
  long count_ = 0;
};

double sinr_empirical(const std::vector<cd>& symbol_outputs, const std::vector<cd>& signal_terms);

constexpr double kSinrCapDb = 200.0;
constexpr double kLightSpeed = 3e8;

struct CpiSizes {
  double symbols_per_ftcpi = 0.0;
  double ftcpis_per_stcpi = 0.0;
};

CpiSizes cpi_calculator(double fc_over_w, double speed, double d_over_lambda, int n_antennas);

double delay_difference(double path_diff, double bandwidth);

// Two significant figures, as the CPI table displays its entries.
double round_sig2(double x);

}  // namespace mimo
