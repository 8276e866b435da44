#include "mimo/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace mimo {

const char* metric_name(MetricKind k) {
  switch (k) {
    case MetricKind::nmse_analytic: return "nmse_analytic";
    case MetricKind::nmse_empirical: return "nmse_empirical";
    case MetricKind::sinr: return "sinr_db";
    case MetricKind::angular_error: return "angular_error_deg";
  }
  return "unknown";
}

double nmse_analytic_traces(double trace_psi_tilde, double trace_r_tilde, double power, int n_f) {
  if (!(trace_r_tilde > 0.0)) throw std::invalid_argument("nmse_analytic: tr(R~) must be positive");
  return (trace_psi_tilde - power * trace_r_tilde) / (power * n_f * trace_r_tilde);
}

double nmse_analytic(const CMat& psi_tilde, const CMat& r_tilde, double power, int n_f) {
  return nmse_analytic_traces(psi_tilde.trace().real(), r_tilde.trace().real(), power, n_f);
}

double nmse_empirical(const std::vector<IecEstimate>& estimates, const std::vector<CVec>& truths) {
  if (estimates.empty() || estimates.size() != truths.size()) throw std::invalid_argument("nmse_empirical: sizes");
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    err += (estimates[i].vector - truths[i]).squaredNorm();
    ref += truths[i].squaredNorm();
  }
  if (!(ref > 0.0)) throw std::invalid_argument("nmse_empirical: zero channel energy");
  return err / ref;
}

double angular_rmse(const std::vector<double>& estimates, const std::vector<double>& truths) {
  if (estimates.empty() || estimates.size() != truths.size()) throw std::invalid_argument("angular_rmse: sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) acc += (estimates[i] - truths[i]) * (estimates[i] - truths[i]);
  return std::sqrt(acc / truths.size());
}

void SinrAccumulator::add(cd s_hat, cd signal) {
  signal_ += std::norm(signal);
  noise_ += std::norm(s_hat - signal);
  ++count_;
}

double SinrAccumulator::linear() const {
  const double cap = std::pow(10.0, kSinrCapDb / 10.0);
  if (noise_ <= 0.0) return cap;
  return std::min(cap, signal_ / noise_);
}

double SinrAccumulator::db() const {
  const double lin = linear();
  if (lin <= 0.0) return -kSinrCapDb;
  return std::max(-kSinrCapDb, 10.0 * std::log10(lin));
}

double sinr_empirical(const std::vector<cd>& symbol_outputs, const std::vector<cd>& signal_terms) {
  if (symbol_outputs.empty() || symbol_outputs.size() != signal_terms.size())
    throw std::invalid_argument("sinr_empirical: sizes");
  SinrAccumulator acc;
  for (std::size_t i = 0; i < symbol_outputs.size(); ++i) acc.add(symbol_outputs[i], signal_terms[i]);
  return acc.linear();
}

CpiSizes cpi_calculator(double fc_over_w, double speed, double d_over_lambda, int n_antennas) {
  if (!(fc_over_w > 0.0 && speed > 0.0 && d_over_lambda > 0.0 && n_antennas > 0))
    throw std::invalid_argument("cpi_calculator: inputs must be positive");
  CpiSizes out;
  out.symbols_per_ftcpi = kLightSpeed / (10.0 * speed * fc_over_w);
  out.ftcpis_per_stcpi = 20.0 * d_over_lambda / n_antennas;
  return out;
}

double delay_difference(double path_diff, double bandwidth) {
  if (path_diff < 0.0 || !(bandwidth > 0.0)) throw std::invalid_argument("delay_difference: bad input");
  return path_diff * bandwidth / kLightSpeed;
}

double round_sig2(double x) {
  if (x == 0.0) return 0.0;
  const double mag = std::pow(10.0, std::floor(std::log10(std::abs(x))) - 1.0);
  return std::round(x / mag) * mag;
}

}  // namespace mimo
