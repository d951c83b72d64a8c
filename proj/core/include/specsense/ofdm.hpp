#ifndef SPECSENSE_OFDM_HPP
#define SPECSENSE_OFDM_HPP

#include <complex>

#include <Eigen/Dense>

#include "specsense/numerics.hpp"

namespace specsense {
namespace ofdm {

/// System constants of the sensing cognitive OFDM receiver.
struct OfdmConfig {
  int num_carriers = 128;    ///< Q
  int num_symbols = 80;      ///< N, observation length per sensing block
  double symbol_duration = 312.5e-9;  ///< T_s [s]
  double carrier_freq = 3.1e9;        ///< f_s [Hz]
  double noise_var = 1.0;    ///< AWGN variance per complex DFT output
  bool cu_active = false;    ///< cognitive system transmitting during sensing

  void validate() const;  // throws std::invalid_argument
};

/// Block-static multipath channel: one frequency response per carrier,
/// shared by all symbols of the sensing block.
struct ChannelRealization {
  Eigen::VectorXcd freq;  ///< H_q, q = 0..Q-1
  Eigen::VectorXcd taps;  ///< time-domain tap gains the response was built from
};

/// Primary-user contribution at the occupied carriers: row (q - first_carrier)
/// holds I_q(n), n = 0..N-1.
struct PuContribution {
  int first_carrier = 0;
  Eigen::MatrixXcd samples;
};

/// Post-DFT receiver observation, Q x N.
struct ObservationBlock {
  Eigen::MatrixXcd y;
  OfdmConfig meta;
};

enum class PowerProfile { kUniform, kExponential };

/// Draws a multipath channel with `num_paths` taps. Tap gains are circular
/// complex Gaussian, scaled so the mean total path power is one; an
/// exponential profile with decay 0 reduces to the uniform profile.
ChannelRealization generate_channel(const OfdmConfig& cfg, int num_paths,
                                    PowerProfile profile, double decay,
                                    RngStream& rng);

/// Synthesizes Y = H.S + I + W. The CU term is present only when
/// cfg.cu_active; symbols are unit-modulus QPSK. `pu` may be null.
ObservationBlock generate_observation(const OfdmConfig& cfg,
                                      const ChannelRealization& channel,
                                      const PuContribution* pu,
                                      RngStream& rng);

/// Copy of the symbols [first, last) of a block, with the metadata length
/// adjusted to match.
ObservationBlock slice_symbols(const ObservationBlock& obs, int first, int last);

}  // namespace ofdm
}  // namespace specsense

#endif  // SPECSENSE_OFDM_HPP
