#include "specsense/pu_models.hpp"

#include <cmath>
#include <deque>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace specsense {
namespace pu {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2 = 0.70710678118654752440;

std::complex<double> unit_phasor(double turns) {
  const double angle = 2.0 * kPi * turns;
  return {std::cos(angle), std::sin(angle)};
}

// Dirichlet kernel ratio sin(pi b L)/sin(pi b) evaluated with the removable
// singularity at integer b handled explicitly.
bool near_integer(double b) { return std::fabs(b - std::round(b)) < 1e-12; }

double dirichlet_ratio(double b, int len) {
  if (near_integer(b)) return static_cast<double>(len);
  return std::sin(kPi * b * len) / std::sin(kPi * b);
}

// Sum over p = pa..pb of exp(j 2 pi b p); invariant under b -> b + 1.
std::complex<double> geometric_phase_sum(double b, int pa, int pb) {
  const int len = pb - pa + 1;
  if (near_integer(b)) return {static_cast<double>(len), 0.0};
  const double ratio = std::sin(kPi * b * len) / std::sin(kPi * b);
  const double phase = kPi * b * (pa + pb);
  return std::complex<double>(std::cos(phase), std::sin(phase)) * ratio;
}

// Tone offsets for carrier q, reduced so the geometric sums stay accurate:
// beta_k = ((f_i - f_s + k/T_i) T_s - q)/Q modulo 1.
Eigen::VectorXd tone_offsets(const TonalPuConfig& cfg, const ofdm::OfdmConfig& sys, int q) {
  const int k_count = cfg.num_tones;
  const double delta_f = cfg.carrier_freq - sys.carrier_freq;
  Eigen::VectorXd beta(k_count);
  for (int k = 0; k < k_count; ++k) {
    const double omega = std::remainder(
        (delta_f + k / cfg.symbol_duration) * sys.symbol_duration,
        static_cast<double>(sys.num_carriers));
    beta(k) = std::remainder((omega - q) / sys.num_carriers, 1.0);
  }
  return beta;
}

Eigen::VectorXd tone_weights(const Eigen::VectorXd& beta, int q_count) {
  Eigen::VectorXd w(beta.size());
  for (Eigen::Index k = 0; k < beta.size(); ++k) {
    const double d = dirichlet_ratio(beta(k), q_count);
    w(k) = d * d;
  }
  return w;
}

}  // namespace

int TonalPuConfig::symbols_per_pu_symbol(const ofdm::OfdmConfig& sys) const {
  return static_cast<int>(std::floor(symbol_duration / sys.symbol_duration));
}

void TonalPuConfig::validate(const ofdm::OfdmConfig& sys) const {
  sys.validate();
  if (num_tones < 1) throw std::invalid_argument("TonalPuConfig: need at least one tone");
  if (!(symbol_duration >= sys.symbol_duration)) {
    throw std::invalid_argument("TonalPuConfig: PU symbol duration must be >= the OFDM symbol duration");
  }
  if (band_first < 0 || band_last < band_first || band_last >= sys.num_carriers) {
    throw std::invalid_argument("TonalPuConfig: band does not fit in [0, Q-1]");
  }
  if (power_per_carrier.size() != band_width()) {
    throw std::invalid_argument("TonalPuConfig: power_per_carrier size must match the band width");
  }
  if ((power_per_carrier.array() < 0.0).any()) {
    throw std::invalid_argument("TonalPuConfig: powers must be non-negative");
  }
}

void ArPuConfig::validate(const ofdm::OfdmConfig& sys) const {
  sys.validate();
  if (!ar_is_stable(phi)) throw std::invalid_argument("ArPuConfig: AR polynomial is not stable");
  if (!(innovation_var > 0.0)) throw std::invalid_argument("ArPuConfig: innovation variance must be positive");
  if (band_first < 0 || band_last < band_first || band_last >= sys.num_carriers) {
    throw std::invalid_argument("ArPuConfig: band does not fit in [0, Q-1]");
  }
  if (power_per_carrier.size() != band_width()) {
    throw std::invalid_argument("ArPuConfig: power_per_carrier size must match the band width");
  }
  if ((power_per_carrier.array() < 0.0).any()) {
    throw std::invalid_argument("ArPuConfig: powers must be non-negative");
  }
  if (burn_in < 0) throw std::invalid_argument("ArPuConfig: burn_in must be non-negative");
}

ArPuConfig ArPuConfig::with_unit_power(Eigen::VectorXd phi, int band_first,
                                       int band_last, Eigen::VectorXd power_per_carrier) {
  ArPuConfig cfg;
  cfg.innovation_var = unit_power_innovation_variance(phi);
  cfg.phi = std::move(phi);
  cfg.band_first = band_first;
  cfg.band_last = band_last;
  cfg.power_per_carrier = std::move(power_per_carrier);
  return cfg;
}

bool ar_is_stable(const Eigen::VectorXd& phi) {
  const int r = static_cast<int>(phi.size());
  if (r == 0) return true;
  // Step-down recursion: stable iff every reflection coefficient has
  // magnitude < 1.
  Eigen::VectorXd c(r + 1);
  c(0) = 1.0;
  c.tail(r) = phi;
  for (int m = r; m >= 1; --m) {
    const double k = c(m);
    if (!(std::fabs(k) < 1.0)) return false;
    Eigen::VectorXd next(m);
    for (int j = 1; j < m; ++j) {
      next(j) = (c(j) - k * c(m - j)) / (1.0 - k * k);
    }
    for (int j = 1; j < m; ++j) c(j) = next(j);
  }
  return true;
}

double unit_power_innovation_variance(const Eigen::VectorXd& phi) {
  if (phi.size() == 0) return 1.0;
  const int r = static_cast<int>(phi.size());
  const double gamma0 = ar_autocovariance(phi, 1.0, std::max(2 * r + 1, 16), 1)(0);
  if (!(gamma0 > 0.0)) throw std::runtime_error("unit_power_innovation_variance: non-positive process power");
  return 1.0 / gamma0;
}

Eigen::VectorXd ar_autocovariance(const Eigen::VectorXd& phi, double nu2,
                                  int total_len, int count) {
  const int r = static_cast<int>(phi.size());
  if (!ar_is_stable(phi)) throw std::invalid_argument("ar_autocovariance: AR polynomial is not stable");
  if (!(nu2 > 0.0)) throw std::invalid_argument("ar_autocovariance: nu2 must be positive");
  if (count < 1 || count > total_len) throw std::invalid_argument("ar_autocovariance: invalid count");
  if (total_len < 2 * r + 1) throw std::invalid_argument("ar_autocovariance: total_len must exceed twice the order");

  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(count);
  if (r == 0) {
    gamma(0) = nu2;
    return gamma;
  }

  // Banded unit-lower-triangular system A i = [i_{0:r-1}; e_{r:.}]. Only the
  // first r rows of the (total_len - r) x r block A21 are populated.
  Eigen::MatrixXd a21 = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const int d = r + i - j;
      if (d >= 1 && d <= r) a21(i, j) = phi(d - 1);
    }
  }
  const Eigen::MatrixXd nw_extra = (a21.transpose() * a21) / nu2;

  // Southeast r x r corner of A22^T A22 / nu2; the band is truncated by the
  // matrix edge, which is what distinguishes the corner from the interior.
  const int m = total_len - r;
  Eigen::VectorXd taps(r + 1);
  taps(0) = 1.0;
  taps.tail(r) = phi;
  Eigen::MatrixXd se(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const int gi = m - r + i;
      const int gj = m - r + j;
      double s = 0.0;
      const int k_lo = std::max(gi, gj);
      const int k_hi = std::min({m - 1, gi + r, gj + r});
      for (int k = k_lo; k <= k_hi; ++k) {
        s += taps(k - gi) * taps(k - gj);
      }
      se(i, j) = s / nu2;
    }
  }

  // Persymmetry of the inverse of a Hermitian Toeplitz matrix maps the
  // southeast corner onto the northwest one, which pins down the unknown
  // R_{i(0:r-1)}.
  Eigen::MatrixXd r0_inv(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      r0_inv(i, j) = se(r - 1 - i, r - 1 - j);
    }
  }
  r0_inv -= nw_extra;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(r0_inv);
  if (!lu.isInvertible()) throw std::runtime_error("ar_autocovariance: corner completion is singular");
  const Eigen::MatrixXd r0 = lu.inverse();

  // gamma is the first column of A^-1 diag(R0, nu2 I) A^-T: one forward AR
  // recursion with the completed corner as the driving term.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(count);
  for (int p = 0; p < count; ++p) {
    double v = (p < r) ? r0(p, 0) : 0.0;
    for (int j = 1; j <= std::min(r, p); ++j) {
      v -= phi(j - 1) * x(p - j);
    }
    x(p) = v;
  }
  return x;
}

NormalizedCovariance::NormalizedCovariance(Eigen::MatrixXcd c, int carrier)
    : c_(std::move(c)), carrier_(carrier) {
  if (c_.rows() != c_.cols() || c_.rows() < 1) {
    throw std::invalid_argument("NormalizedCovariance: matrix must be square");
  }
  for (Eigen::Index n = 0; n < c_.rows(); ++n) {
    if (std::abs(c_(n, n) - 1.0) > 1e-9) {
      throw std::invalid_argument("NormalizedCovariance: diagonal must be one");
    }
  }
  eigen_ = hermitian_eig(c_);  // also rejects non-Hermitian input
  if (eigen_.values.minCoeff() < -1e-9) {
    throw std::invalid_argument("NormalizedCovariance: matrix is not positive semidefinite");
  }
}

NormalizedCovariance tonal_covariance(const TonalPuConfig& cfg,
                                      const ofdm::OfdmConfig& sys, int q) {
  cfg.validate(sys);
  if (q < 0 || q >= sys.num_carriers) {
    throw std::invalid_argument("tonal_covariance: carrier out of range");
  }
  const int n_count = sys.num_symbols;
  const int eta = cfg.symbols_per_pu_symbol(sys);
  const Eigen::VectorXd beta = tone_offsets(cfg, sys, q);
  const Eigen::VectorXd w = tone_weights(beta, sys.num_carriers);
  const double w_sum = w.sum();
  if (!(w_sum > 1e-9)) {
    throw std::runtime_error("tonal_covariance: degenerate model, no tone reaches the carrier");
  }

  // Reduced per-tone cycles advanced per OFDM symbol, T_s (f_i + k/T_i) mod 1.
  Eigen::VectorXd nu(cfg.num_tones);
  for (int k = 0; k < cfg.num_tones; ++k) {
    nu(k) = std::remainder(sys.symbol_duration * cfg.carrier_freq +
                               k * sys.symbol_duration / cfg.symbol_duration,
                           1.0);
  }

  Eigen::VectorXcd lag(n_count);
  lag(0) = 1.0;
  for (int d = 1; d < n_count; ++d) {
    if (d >= eta) {
      lag(d) = 0.0;
      continue;
    }
    std::complex<double> acc = 0.0;
    for (int k = 0; k < cfg.num_tones; ++k) {
      acc += w(k) * unit_phasor(std::remainder(d * nu(k), 1.0));
    }
    lag(d) = (1.0 - static_cast<double>(d) / eta) * acc / w_sum;
  }

  Eigen::MatrixXcd c(n_count, n_count);
  for (int n = 0; n < n_count; ++n) {
    c(n, n) = lag(0);
    for (int m = 0; m < n; ++m) {
      c(n, m) = lag(n - m);
      c(m, n) = std::conj(lag(n - m));
    }
  }
  return NormalizedCovariance(std::move(c), q);
}

ofdm::PuContribution generate_tonal(const TonalPuConfig& cfg,
                                    const ofdm::OfdmConfig& sys, RngStream& rng) {
  cfg.validate(sys);
  const int width = cfg.band_width();
  const int n_count = sys.num_symbols;
  const int q_count = sys.num_carriers;
  const int k_count = cfg.num_tones;
  const double t_i = cfg.symbol_duration;
  const double t_s = sys.symbol_duration;
  const double t_d = t_s / q_count;

  // Per-carrier tone offsets and the analytic power used for scaling.
  Eigen::MatrixXd beta(k_count, width);
  Eigen::VectorXd w_sum(width);
  for (int qi = 0; qi < width; ++qi) {
    beta.col(qi) = tone_offsets(cfg, sys, cfg.band_first + qi);
    w_sum(qi) = tone_weights(beta.col(qi), q_count).sum();
    if (!(w_sum(qi) > 1e-9) && cfg.power_per_carrier(qi) > 0.0) {
      throw std::runtime_error("generate_tonal: degenerate model, no tone reaches carrier " +
                               std::to_string(cfg.band_first + qi));
    }
  }

  const double t0 = rng.uniform() * t_i;
  const double phase0 = rng.uniform();  // carrier phase, in turns
  const double fi_ti = cfg.carrier_freq * t_i;

  // PSK data times fading, one coefficient per (PU symbol, tone); drawn on
  // first use, so the draw order follows the PU symbol index.
  std::deque<std::pair<long, Eigen::VectorXcd>> coeff_cache;
  auto coeffs_for = [&](long l) -> const Eigen::VectorXcd& {
    while (!coeff_cache.empty() && coeff_cache.front().first < l - 1) coeff_cache.pop_front();
    for (auto& entry : coeff_cache) {
      if (entry.first == l) return entry.second;
    }
    Eigen::VectorXcd c(k_count);
    for (int k = 0; k < k_count; ++k) {
      const std::uint64_t sym = rng.uniform_int(4);
      const std::complex<double> x(sym & 1 ? -kInvSqrt2 : kInvSqrt2,
                                   sym & 2 ? -kInvSqrt2 : kInvSqrt2);
      const std::complex<double> zeta = cfg.fading == FadingKind::kComplexGaussian
                                            ? rng.complex_gaussian(1.0)
                                            : unit_phasor(rng.uniform());
      c(k) = zeta * x;
    }
    coeff_cache.emplace_back(l, std::move(c));
    return coeff_cache.back().second;
  };

  ofdm::PuContribution out;
  out.first_carrier = cfg.band_first;
  out.samples = Eigen::MatrixXcd::Zero(width, n_count);

  Eigen::VectorXcd tone_term(k_count);
  for (int n = 0; n < n_count; ++n) {
    const double sym_start = n * t_s + t0;
    const long l0 = static_cast<long>(std::floor(sym_start / t_i));
    long p_star = static_cast<long>(std::ceil(((l0 + 1) * t_i - sym_start) / t_d));
    p_star = std::max<long>(1, p_star);

    struct Segment {
      long l;
      int pa, pb;
    };
    Segment segments[2];
    int seg_count = 0;
    if (p_star >= q_count) {
      segments[seg_count++] = {l0, 0, q_count - 1};
    } else {
      segments[seg_count++] = {l0, 0, static_cast<int>(p_star) - 1};
      segments[seg_count++] = {l0 + 1, static_cast<int>(p_star), q_count - 1};
    }

    for (int s = 0; s < seg_count; ++s) {
      const Segment& seg = segments[s];
      const Eigen::VectorXcd& coef = coeffs_for(seg.l);
      for (int k = 0; k < k_count; ++k) {
        const double turns = std::remainder(sym_start * cfg.carrier_freq, 1.0) +
                             std::remainder(sym_start * k / t_i, 1.0) -
                             std::remainder(seg.l * fi_ti, 1.0) + phase0;
        tone_term(k) = coef(k) * unit_phasor(turns);
      }
      for (int qi = 0; qi < width; ++qi) {
        std::complex<double> acc = 0.0;
        for (int k = 0; k < k_count; ++k) {
          acc += tone_term(k) * geometric_phase_sum(beta(k, qi), seg.pa, seg.pb);
        }
        out.samples(qi, n) += acc;
      }
    }
  }

  for (int qi = 0; qi < width; ++qi) {
    const double p = cfg.power_per_carrier(qi);
    const double scale = p > 0.0 ? std::sqrt(p / w_sum(qi)) : 0.0;
    out.samples.row(qi) *= scale;
  }
  return out;
}

NormalizedCovariance ar_covariance(const ArPuConfig& cfg,
                                   const ofdm::OfdmConfig& sys, int q) {
  cfg.validate(sys);
  if (q < 0 || q >= sys.num_carriers) {
    throw std::invalid_argument("ar_covariance: carrier out of range");
  }
  const int q_count = sys.num_carriers;
  const int n_count = sys.num_symbols;
  const long total = static_cast<long>(q_count) * n_count;
  if (total <= 2 * cfg.order()) {
    throw std::invalid_argument("ar_covariance: QN must exceed twice the AR order");
  }
  const Eigen::VectorXd gamma =
      ar_autocovariance(cfg.phi, cfg.innovation_var, static_cast<int>(total), static_cast<int>(total));

  // Block covariance at symbol lag d: sum over sample lags s of
  // (Q - |s|) gamma(dQ + s) exp(-j 2 pi q s / Q).
  Eigen::VectorXcd twiddle(2 * q_count - 1);
  for (int s = -(q_count - 1); s <= q_count - 1; ++s) {
    twiddle(s + q_count - 1) = unit_phasor(-static_cast<double>(q) * s / q_count);
  }
  Eigen::VectorXcd lag(n_count);
  for (int d = 0; d < n_count; ++d) {
    std::complex<double> acc = 0.0;
    for (int s = -(q_count - 1); s <= q_count - 1; ++s) {
      const long idx = static_cast<long>(d) * q_count + s;
      const double g = gamma(std::labs(idx));
      acc += static_cast<double>(q_count - std::abs(s)) * g * twiddle(s + q_count - 1);
    }
    lag(d) = acc;
  }
  const double power = lag(0).real();
  if (!(power > 0.0)) throw std::runtime_error("ar_covariance: degenerate carrier power");

  Eigen::MatrixXcd c(n_count, n_count);
  for (int n = 0; n < n_count; ++n) {
    c(n, n) = 1.0;
    for (int m = 0; m < n; ++m) {
      c(n, m) = lag(n - m) / power;
      c(m, n) = std::conj(c(n, m));
    }
  }
  return NormalizedCovariance(std::move(c), q);
}

ofdm::PuContribution generate_ar(const ArPuConfig& cfg,
                                 const ofdm::OfdmConfig& sys, RngStream& rng) {
  cfg.validate(sys);
  const int q_count = sys.num_carriers;
  const int n_count = sys.num_symbols;
  const int width = cfg.band_width();
  const int r = cfg.order();
  const long total = static_cast<long>(q_count) * n_count;

  // Time-domain recursion from a zero state, burn-in discarded.
  Eigen::VectorXcd samples(total);
  Eigen::VectorXcd recent = Eigen::VectorXcd::Zero(std::max(r, 1));  // recent(j-1) = i_{p-j}
  long produced = 0;
  for (long p = 0; p < cfg.burn_in + total; ++p) {
    std::complex<double> v = rng.complex_gaussian(cfg.innovation_var);
    for (int j = 1; j <= r; ++j) {
      v -= cfg.phi(j - 1) * recent(j - 1);
    }
    for (int j = r - 1; j >= 1; --j) recent(j) = recent(j - 1);
    if (r > 0) recent(0) = v;
    if (p >= cfg.burn_in) samples(produced++) = v;
  }

  // Analytic per-carrier power of the unscaled process through the DFT row.
  const Eigen::VectorXd gamma =
      ar_autocovariance(cfg.phi, cfg.innovation_var, std::max(2 * r + 1, q_count), q_count);

  ofdm::PuContribution out;
  out.first_carrier = cfg.band_first;
  out.samples.resize(width, n_count);
  for (int qi = 0; qi < width; ++qi) {
    const int q = cfg.band_first + qi;
    double power = 0.0;
    for (int s = -(q_count - 1); s <= q_count - 1; ++s) {
      power += (q_count - std::abs(s)) * gamma(std::abs(s)) *
               std::cos(2.0 * kPi * q * s / q_count);
    }
    if (!(power > 0.0) && cfg.power_per_carrier(qi) > 0.0) {
      throw std::runtime_error("generate_ar: degenerate carrier power at carrier " + std::to_string(q));
    }
    const double p_target = cfg.power_per_carrier(qi);
    const double scale = p_target > 0.0 ? std::sqrt(p_target / power) : 0.0;

    Eigen::VectorXcd row_twiddle(q_count);
    for (int a = 0; a < q_count; ++a) {
      row_twiddle(a) = unit_phasor(-static_cast<double>(q) * a / q_count);
    }
    for (int n = 0; n < n_count; ++n) {
      std::complex<double> acc = 0.0;
      for (int a = 0; a < q_count; ++a) {
        acc += samples(static_cast<long>(n) * q_count + a) * row_twiddle(a);
      }
      out.samples(qi, n) = scale * acc;
    }
  }
  return out;
}

void export_covariance_csv(const NormalizedCovariance& cov, std::ostream& os) {
  const Eigen::MatrixXcd& c = cov.matrix();
  os.precision(17);
  for (Eigen::Index n = 0; n < c.rows(); ++n) {
    for (Eigen::Index m = 0; m < c.cols(); ++m) {
      if (m > 0) os << ',';
      os << c(n, m).real() << ',' << c(n, m).imag();
    }
    os << '\n';
  }
}

}  // namespace pu
}  // namespace specsense
