#ifndef SPECSENSE_CASE_A_HPP
#define SPECSENSE_CASE_A_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specsense/numerics.hpp"
#include "specsense/ofdm.hpp"
#include "specsense/pu_models.hpp"

namespace specsense {
namespace case_a {

enum class CalibrationMethod { kAsymptoticGaussian, kEmpiricalHistogram };

struct CaseAConfig {
  int band_first = 0;
  int band_last = 0;
  double alpha = 0.1;  ///< overall false-alarm target across the band
  CalibrationMethod calibration = CalibrationMethod::kEmpiricalHistogram;
  int calibration_trials = 100000;
  double noise_var = 1.0;

  int band_width() const { return band_last - band_first + 1; }
  void validate() const;
};

/// Per-carrier decisions plus the OR-fused verdict.
struct DetectorReport {
  Eigen::VectorXd statistic;
  Eigen::VectorXd threshold;
  std::vector<bool> decision;
  bool fused = false;
};

/// Quadratic-form test statistic y^H C y for a known normalized covariance.
/// The imaginary residue must vanish (asserted, then dropped).
double lmp_statistic(const Eigen::VectorXcd& y, const pu::NormalizedCovariance& c);

/// ||y||^2, the covariance-blind baseline.
double energy_statistic(const Eigen::VectorXcd& y);

/// Likelihood-ratio statistic when the received PU power is known,
/// sigma^-2 P y^H C (P C + sigma^2 I)^-1 y, evaluated through the cached
/// eigendecomposition.
double estimator_correlator_statistic(const Eigen::VectorXcd& y,
                                      const pu::NormalizedCovariance& c,
                                      double pu_power, double noise_var);

/// Per-carrier false alarm that makes the OR-fused rate equal alpha:
/// 1 - (1 - alpha)^(1/b_pu).
double per_carrier_alpha(double alpha, int b_pu);

/// Detection threshold for the LMP statistic at per-carrier level alpha_q.
/// The asymptotic method uses the Gaussian closed form
/// sigma^2 N + sigma^2 sqrt(tr C^2) Qinv(alpha_q); the empirical method
/// simulates `trials` noise-only statistics at unit noise and rescales (the
/// statistic is degree-2 homogeneous in the noise amplitude).
double calibrate_threshold(const pu::NormalizedCovariance& c, double noise_var,
                           double alpha_q, CalibrationMethod method,
                           int trials = 100000, RngStream* rng = nullptr);

/// Asymptotic mean and variance of the statistic under a Gaussian PU of power
/// pu_power: tr(C (P C + sigma^2 I)) and tr((C (P C + sigma^2 I))^2).
std::pair<double, double> asymptotic_h1_moments(const pu::NormalizedCovariance& c,
                                                double pu_power, double noise_var);

/// Runs the per-carrier tests over the configured band and OR-fuses the
/// decisions. `covariances` and `thresholds` are indexed by carrier offset
/// from band_first and must cover the whole band.
DetectorReport detect_band(const ofdm::ObservationBlock& obs,
                           std::span<const pu::NormalizedCovariance> covariances,
                           const CaseAConfig& cfg,
                           std::span<const double> thresholds);

/// One calibrated threshold, keyed so campaigns can reuse calibrations.
struct ThresholdEntry {
  int carrier = 0;
  double alpha_q = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  double value = 0.0;
};

void save_threshold_table(const std::vector<ThresholdEntry>& table, std::ostream& os);
std::vector<ThresholdEntry> load_threshold_table(std::istream& is);

}  // namespace case_a
}  // namespace specsense

#endif  // SPECSENSE_CASE_A_HPP
