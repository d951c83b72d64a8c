#include "specsense/ofdm.hpp"

#include <cmath>
#include <stdexcept>

namespace specsense {
namespace ofdm {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2 = 0.70710678118654752440;
}  // namespace

void OfdmConfig::validate() const {
  if (num_carriers < 2) throw std::invalid_argument("OfdmConfig: need at least 2 sub-carriers");
  if (num_symbols < 1) throw std::invalid_argument("OfdmConfig: need at least 1 OFDM symbol");
  if (!(symbol_duration > 0.0)) throw std::invalid_argument("OfdmConfig: symbol duration must be positive");
  if (!(noise_var > 0.0)) throw std::invalid_argument("OfdmConfig: noise variance must be positive");
}

ChannelRealization generate_channel(const OfdmConfig& cfg, int num_paths,
                                    PowerProfile profile, double decay,
                                    RngStream& rng) {
  cfg.validate();
  if (num_paths < 1 || num_paths > cfg.num_carriers) {
    throw std::invalid_argument("generate_channel: num_paths must lie in [1, Q]");
  }
  if (profile == PowerProfile::kExponential && decay < 0.0) {
    throw std::invalid_argument("generate_channel: decay must be non-negative");
  }

  // Per-tap mean powers, normalized to unit total.
  Eigen::VectorXd power(num_paths);
  if (profile == PowerProfile::kUniform) {
    power.setConstant(1.0 / num_paths);
  } else {
    for (int l = 0; l < num_paths; ++l) power(l) = std::exp(-decay * l);
    power /= power.sum();
  }

  ChannelRealization ch;
  ch.taps.resize(num_paths);
  for (int l = 0; l < num_paths; ++l) {
    ch.taps(l) = rng.complex_gaussian(power(l));
  }
  ch.freq.resize(cfg.num_carriers);
  for (int q = 0; q < cfg.num_carriers; ++q) {
    std::complex<double> h = 0.0;
    for (int l = 0; l < num_paths; ++l) {
      const double phase = -2.0 * kPi * q * l / cfg.num_carriers;
      h += ch.taps(l) * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    ch.freq(q) = h;
  }
  return ch;
}

ObservationBlock generate_observation(const OfdmConfig& cfg,
                                      const ChannelRealization& channel,
                                      const PuContribution* pu,
                                      RngStream& rng) {
  cfg.validate();
  const int q_count = cfg.num_carriers;
  const int n_count = cfg.num_symbols;
  if (cfg.cu_active && channel.freq.size() != q_count) {
    throw std::invalid_argument("generate_observation: channel response size does not match Q");
  }
  if (pu != nullptr) {
    if (pu->first_carrier < 0 ||
        pu->first_carrier + pu->samples.rows() > q_count ||
        pu->samples.cols() != n_count) {
      throw std::invalid_argument("generate_observation: PU contribution does not fit the configuration");
    }
  }

  ObservationBlock obs;
  obs.meta = cfg;
  obs.y.resize(q_count, n_count);
  for (int n = 0; n < n_count; ++n) {
    for (int q = 0; q < q_count; ++q) {
      obs.y(q, n) = rng.complex_gaussian(cfg.noise_var);
    }
  }
  if (cfg.cu_active) {
    for (int n = 0; n < n_count; ++n) {
      for (int q = 0; q < q_count; ++q) {
        // QPSK constellation point, unit modulus.
        const std::uint64_t sym = rng.uniform_int(4);
        const std::complex<double> s(sym & 1 ? -kInvSqrt2 : kInvSqrt2,
                                     sym & 2 ? -kInvSqrt2 : kInvSqrt2);
        obs.y(q, n) += channel.freq(q) * s;
      }
    }
  }
  if (pu != nullptr) {
    obs.y.block(pu->first_carrier, 0, pu->samples.rows(), n_count) += pu->samples;
  }
  return obs;
}

ObservationBlock slice_symbols(const ObservationBlock& obs, int first, int last) {
  if (first < 0 || last > obs.y.cols() || first >= last) {
    throw std::invalid_argument("slice_symbols: invalid symbol range");
  }
  ObservationBlock out;
  out.meta = obs.meta;
  out.meta.num_symbols = last - first;
  out.y = obs.y.middleCols(first, last - first);
  return out;
}

}  // namespace ofdm
}  // namespace specsense
