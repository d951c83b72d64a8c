#include "specsense/case_a.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace specsense {
namespace case_a {

void CaseAConfig::validate() const {
  if (band_first < 0 || band_last < band_first) {
    throw std::invalid_argument("CaseAConfig: invalid band");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("CaseAConfig: alpha must lie in (0, 1)");
  }
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("CaseAConfig: noise variance must be positive");
  }
  if (calibration_trials < 1) {
    throw std::invalid_argument("CaseAConfig: calibration_trials must be positive");
  }
}

double lmp_statistic(const Eigen::VectorXcd& y, const pu::NormalizedCovariance& c) {
  if (y.size() != c.size()) {
    throw std::invalid_argument("lmp_statistic: dimension mismatch");
  }
  const std::complex<double> v = y.adjoint() * (c.matrix() * y);
  if (std::fabs(v.imag()) > 1e-9 * std::max(1.0, std::fabs(v.real()))) {
    throw std::runtime_error("lmp_statistic: non-real quadratic form");
  }
  return v.real();
}

double energy_statistic(const Eigen::VectorXcd& y) { return y.squaredNorm(); }

double estimator_correlator_statistic(const Eigen::VectorXcd& y,
                                      const pu::NormalizedCovariance& c,
                                      double pu_power, double noise_var) {
  if (y.size() != c.size()) {
    throw std::invalid_argument("estimator_correlator_statistic: dimension mismatch");
  }
  if (pu_power < 0.0) {
    throw std::domain_error("estimator_correlator_statistic: power must be non-negative");
  }
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("estimator_correlator_statistic: noise variance must be positive");
  }
  const EigenSystem& es = c.eigen();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    const double lam = es.values(i);
    const double gain = pu_power * lam / (pu_power * lam + noise_var);
    if (gain != 0.0) {
      acc += gain * std::norm(es.vectors.col(i).dot(y));
    }
  }
  return acc / noise_var;
}

double per_carrier_alpha(double alpha, int b_pu) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("per_carrier_alpha: alpha must lie in (0, 1)");
  }
  if (b_pu < 1) throw std::invalid_argument("per_carrier_alpha: band width must be >= 1");
  return 1.0 - std::pow(1.0 - alpha, 1.0 / b_pu);
}

double calibrate_threshold(const pu::NormalizedCovariance& c, double noise_var,
                           double alpha_q, CalibrationMethod method, int trials,
                           RngStream* rng) {
  if (!(alpha_q > 0.0 && alpha_q < 1.0)) {
    throw std::invalid_argument("calibrate_threshold: alpha_q must lie in (0, 1)");
  }
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("calibrate_threshold: noise variance must be positive");
  }
  const int n = c.size();
  if (method == CalibrationMethod::kAsymptoticGaussian) {
    const double tr_c2 = c.eigen().values.squaredNorm();
    return noise_var * n + noise_var * std::sqrt(tr_c2) * gaussian_q_inv(alpha_q);
  }

  if (rng == nullptr) {
    throw std::invalid_argument("calibrate_threshold: empirical calibration needs a random stream");
  }
  if (static_cast<double>(trials) < 50.0 / alpha_q) {
    throw std::runtime_error("calibrate_threshold: too few trials to resolve alpha_q");
  }
  // Under noise only the statistic is a weighted sum of independent unit
  // exponentials with the eigenvalues as weights; sample it at unit noise
  // and rescale.
  const Eigen::VectorXd& lam = c.eigen().values;
  std::vector<double> stats(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = std::max(lam(i), 0.0);
      s += w * (-std::log(1.0 - rng->uniform()));
    }
    stats[static_cast<std::size_t>(t)] = s;
  }
  std::sort(stats.begin(), stats.end());
  auto rank = static_cast<std::size_t>(std::floor((1.0 - alpha_q) * trials));
  rank = std::min(rank, stats.size() - 1);
  return noise_var * stats[rank];
}

std::pair<double, double> asymptotic_h1_moments(const pu::NormalizedCovariance& c,
                                                double pu_power, double noise_var) {
  if (pu_power < 0.0) {
    throw std::domain_error("asymptotic_h1_moments: power must be non-negative");
  }
  const Eigen::VectorXd& lam = c.eigen().values;
  double mean = 0.0;
  double var = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const double m = lam(i) * (pu_power * lam(i) + noise_var);
    mean += m;
    var += m * m;
  }
  return {mean, var};
}

DetectorReport detect_band(const ofdm::ObservationBlock& obs,
                           std::span<const pu::NormalizedCovariance> covariances,
                           const CaseAConfig& cfg,
                           std::span<const double> thresholds) {
  cfg.validate();
  const int width = cfg.band_width();
  if (cfg.band_last >= obs.meta.num_carriers) {
    throw std::invalid_argument("detect_band: band does not fit the observation");
  }
  if (static_cast<int>(covariances.size()) != width) {
    throw std::invalid_argument("detect_band: need one covariance per band carrier");
  }
  if (static_cast<int>(thresholds.size()) != width) {
    throw std::invalid_argument("detect_band: need one threshold per band carrier");
  }

  DetectorReport report;
  report.statistic.resize(width);
  report.threshold.resize(width);
  report.decision.resize(static_cast<std::size_t>(width));
  for (int qi = 0; qi < width; ++qi) {
    const Eigen::VectorXcd y = obs.y.row(cfg.band_first + qi).transpose();
    report.statistic(qi) = lmp_statistic(y, covariances[qi]);
    report.threshold(qi) = thresholds[qi];
    const bool hit = report.statistic(qi) > thresholds[qi];
    report.decision[static_cast<std::size_t>(qi)] = hit;
    report.fused = report.fused || hit;
  }
  return report;
}

void save_threshold_table(const std::vector<ThresholdEntry>& table, std::ostream& os) {
  os << "carrier,alpha_q,method,seed,threshold\n";
  os.precision(17);
  for (const auto& e : table) {
    os << e.carrier << ',' << e.alpha_q << ',' << e.method << ',' << e.seed << ','
       << e.value << '\n';
  }
}

std::vector<ThresholdEntry> load_threshold_table(std::istream& is) {
  std::vector<ThresholdEntry> table;
  std::string line;
  if (!std::getline(is, line)) {
    throw std::runtime_error("load_threshold_table: empty input");
  }
  if (line != "carrier,alpha_q,method,seed,threshold") {
    throw std::runtime_error("load_threshold_table: unexpected header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ThresholdEntry e;
    char comma = 0;
    ss >> e.carrier >> comma >> e.alpha_q >> comma;
    if (!std::getline(ss, e.method, ',')) {
      throw std::runtime_error("load_threshold_table: malformed row");
    }
    ss >> e.seed >> comma >> e.value;
    if (ss.fail()) throw std::runtime_error("load_threshold_table: malformed row");
    table.push_back(std::move(e));
  }
  return table;
}

}  // namespace case_a
}  // namespace specsense
