#ifndef SPECSENSE_PU_MODELS_HPP
#define SPECSENSE_PU_MODELS_HPP

#include <iosfwd>

#include <Eigen/Dense>

#include "specsense/numerics.hpp"
#include "specsense/ofdm.hpp"

namespace specsense {
namespace pu {

enum class FadingKind {
  kComplexGaussian,  ///< Rayleigh amplitude, uniform phase (default)
  kUnitPhase,        ///< unit amplitude, uniform phase
};

/// Sum-of-complex-sinusoids primary user. The K tones sit at f_i + k/T_i,
/// k = 0..K-1; per PU symbol each tone carries an independent PSK symbol
/// times a fading coefficient.
struct TonalPuConfig {
  int num_tones = 1;          ///< K
  double symbol_duration = 26.6e-6;  ///< T_i [s]
  double carrier_freq = 3.36e9;      ///< f_i [Hz]
  int band_first = 0;         ///< q0
  int band_last = 0;          ///< q1
  Eigen::VectorXd power_per_carrier;  ///< target received power, one entry per band carrier
  FadingKind fading = FadingKind::kComplexGaussian;

  int band_width() const { return band_last - band_first + 1; }
  /// OFDM symbols per PU symbol, floor(T_i / T_s).
  int symbols_per_pu_symbol(const ofdm::OfdmConfig& sys) const;
  void validate(const ofdm::OfdmConfig& sys) const;
};

/// Autoregressive primary user: i_p = -sum_j phi_j i_{p-j} + e_p with
/// circular complex Gaussian innovations of variance nu2.
struct ArPuConfig {
  Eigen::VectorXd phi;        ///< AR coefficients, order r = phi.size()
  double innovation_var = 1.0;  ///< nu^2
  int band_first = 0;
  int band_last = 0;
  Eigen::VectorXd power_per_carrier;
  int burn_in = 1024;         ///< samples discarded before the block starts

  int order() const { return static_cast<int>(phi.size()); }
  int band_width() const { return band_last - band_first + 1; }
  void validate(const ofdm::OfdmConfig& sys) const;

  /// Same coefficients with the innovation variance set so the process has
  /// unit power.
  static ArPuConfig with_unit_power(Eigen::VectorXd phi, int band_first,
                                    int band_last, Eigen::VectorXd power_per_carrier);
};

/// True iff the polynomial 1 + phi_1 z^-1 + ... + phi_r z^-r has all roots
/// strictly inside the unit circle (step-down recursion on reflection
/// coefficients).
bool ar_is_stable(const Eigen::VectorXd& phi);

/// Innovation variance that gives the AR process unit power.
double unit_power_innovation_variance(const Eigen::VectorXd& phi);

/// N x N Hermitian PSD covariance with unit diagonal, eigendecomposition
/// cached at construction. Construction validates the invariants
/// (Hermitian, unit diagonal to 1e-9, smallest eigenvalue >= -1e-9).
class NormalizedCovariance {
 public:
  NormalizedCovariance(Eigen::MatrixXcd c, int carrier);

  const Eigen::MatrixXcd& matrix() const { return c_; }
  int carrier() const { return carrier_; }
  int size() const { return static_cast<int>(c_.rows()); }
  const EigenSystem& eigen() const { return eigen_; }

 private:
  Eigen::MatrixXcd c_;
  int carrier_;
  EigenSystem eigen_;
};

/// Closed-form normalized covariance of the tonal PU at carrier q: Dirichlet
/// weighted tone average with the triangular same-PU-symbol taper; entries at
/// lag >= eta are exactly zero.
NormalizedCovariance tonal_covariance(const TonalPuConfig& cfg,
                                      const ofdm::OfdmConfig& sys, int q);

/// Draws one block of tonal PU contributions over the configured band.
/// The OFDM frame origin is uniform over the PU symbol clock, PSK symbols
/// and fading are redrawn per PU symbol, and OFDM symbols crossing a PU
/// symbol boundary are synthesized exactly from both segments.
ofdm::PuContribution generate_tonal(const TonalPuConfig& cfg,
                                    const ofdm::OfdmConfig& sys, RngStream& rng);

/// Normalized covariance of the AR PU at carrier q, from the exact process
/// autocovariance pushed through the per-symbol DFT rows.
NormalizedCovariance ar_covariance(const ArPuConfig& cfg,
                                   const ofdm::OfdmConfig& sys, int q);

/// Draws one block of AR PU contributions over the configured band.
ofdm::PuContribution generate_ar(const ArPuConfig& cfg,
                                 const ofdm::OfdmConfig& sys, RngStream& rng);

/// Process autocovariance gamma(0..count-1) recovered from the banded
/// unit-lower-triangular system: the corner block is completed from the
/// persymmetry of the inverse and the remaining lags follow by recursion.
Eigen::VectorXd ar_autocovariance(const Eigen::VectorXd& phi, double nu2,
                                  int total_len, int count);

/// Row-major CSV dump, real/imag interleaved.
void export_covariance_csv(const NormalizedCovariance& cov, std::ostream& os);

}  // namespace pu
}  // namespace specsense

#endif  // SPECSENSE_PU_MODELS_HPP
