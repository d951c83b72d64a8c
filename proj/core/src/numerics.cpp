#include "specsense/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace specsense {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  std::uint64_t state = seed ^ (0xA0761D6478BD642Full * (stream + 1));
  const std::uint32_t w0 = static_cast<std::uint32_t>(splitmix64(state));
  const std::uint32_t w1 = static_cast<std::uint32_t>(splitmix64(state));
  const std::uint32_t w2 = static_cast<std::uint32_t>(splitmix64(state));
  const std::uint32_t w3 = static_cast<std::uint32_t>(splitmix64(state));
  const std::uint32_t w4 = static_cast<std::uint32_t>(splitmix64(state));
  const std::uint32_t w5 = static_cast<std::uint32_t>(splitmix64(state));
  std::seed_seq seq{w0, w1, w2, w3, w4, w5};
  engine_.seed(seq);
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  cached_gaussian_ = radius * std::sin(angle);
  has_cached_gaussian_ = true;
  return radius * std::cos(angle);
}

std::complex<double> RngStream::complex_gaussian(double variance) {
  const double s = std::sqrt(variance * 0.5);
  return {s * gaussian(), s * gaussian()};
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

RngStream RngStream::substream(std::uint64_t id) const {
  std::uint64_t state = seed_ ^ (stream_ * 0xD6E8FEB86659FD93ull);
  const std::uint64_t child_seed = splitmix64(state) ^ 0x2545F4914F6CDD1Dull;
  return RngStream(child_seed, id);
}

EigenSystem hermitian_eig(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eig: matrix must be square");
  const double scale = a.norm();
  if ((a - a.adjoint()).norm() > 1e-9 * std::max(scale, 1.0)) {
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  }
  // Eigen returns ascending order; flip to descending.
  const Eigen::Index n = a.rows();
  EigenSystem out;
  out.values = solver.eigenvalues().reverse();
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation to the standard normal quantile,
// |relative error| < 1.15e-9, refined below by Newton steps.
double normal_ppf_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

}  // namespace

double gaussian_q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("gaussian_q_inv: p must lie in (0, 1)");
  }
  // Q(x) = p  <=>  x = Phi^-1(1 - p) = -Phi^-1(p).
  double x = -normal_ppf_approx(p);
  for (int i = 0; i < 2; ++i) {
    const double err = gaussian_q(x) - p;
    const double pdf = normal_pdf(x);
    if (pdf <= 0.0) break;
    x += err / pdf;
  }
  return x;
}

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  const double tiny = 1e-300;
  const double eps = 1e-15;
  const int max_iter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::invalid_argument("regularized_incomplete_beta: a, b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                   beta_continued_fraction(b, a, 1.0 - x) / b;
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p: a must be positive");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    // Series representation.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) {
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
      }
    }
    throw std::runtime_error("regularized_gamma_p: series did not converge");
  }
  // Continued fraction for Q(a, x) = 1 - P(a, x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) {
      return 1.0 - h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("regularized_gamma_p: continued fraction did not converge");
}

double f_cdf(double x, double d1, double d2) {
  if (!(d1 >= 1.0 && d2 >= 1.0)) throw std::invalid_argument("f_cdf: degrees of freedom must be >= 1");
  if (x <= 0.0) return 0.0;
  return regularized_incomplete_beta(d1 * x / (d1 * x + d2), 0.5 * d1, 0.5 * d2);
}

double f_sf(double x, double d1, double d2) {
  if (!(d1 >= 1.0 && d2 >= 1.0)) throw std::invalid_argument("f_sf: degrees of freedom must be >= 1");
  if (x <= 0.0) return 1.0;
  // Complement form keeps the far tail accurate.
  return regularized_incomplete_beta(d2 / (d1 * x + d2), 0.5 * d2, 0.5 * d1);
}

double f_quantile(double p, double d1, double d2) {
  if (!(d1 >= 1.0 && d2 >= 1.0)) throw std::invalid_argument("f_quantile: degrees of freedom must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("f_quantile: p must lie in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  while (f_cdf(hi, d1, d2) < p) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("f_quantile: bracket expansion failed");
  }
  // Bisection to ~1e-12 relative width.
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f_cdf(mid, d1, d2) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

double noncentral_f_sf(double x, double d1, double d2, double lambda) {
  if (!(d1 >= 1.0 && d2 >= 1.0)) {
    throw std::invalid_argument("noncentral_f_sf: degrees of freedom must be >= 1");
  }
  if (lambda < 0.0) throw std::invalid_argument("noncentral_f_sf: lambda must be non-negative");
  if (x <= 0.0) return 1.0;
  if (lambda == 0.0) return f_sf(x, d1, d2);

  const double half_lambda = 0.5 * lambda;
  const double y_complement = d2 / (d1 * x + d2);
  double weight = std::exp(-half_lambda);  // Poisson(half_lambda) mass at j = 0
  double weight_sum = weight;
  double sf = 0.0;
  const int max_terms = 100000;
  for (int j = 0; j < max_terms; ++j) {
    if (weight > 0.0) {
      sf += weight * regularized_incomplete_beta(y_complement, 0.5 * d2, 0.5 * d1 + j);
    }
    // Remaining Poisson mass bounds the truncation error of the mixture.
    if (j > half_lambda && 1.0 - weight_sum < 1e-12) {
      return std::min(1.0, std::max(0.0, sf));
    }
    weight *= half_lambda / (j + 1);
    weight_sum += weight;
  }
  throw std::runtime_error("noncentral_f_sf: Poisson mixture did not converge");
}

double chi_squared_cdf(double x, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("chi_squared_cdf: k must be positive");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * k, 0.5 * x);
}

double chi_squared_quantile(double p, double k) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chi_squared_quantile: p must lie in (0, 1)");
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * k);
  while (chi_squared_cdf(hi, k) < p) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("chi_squared_quantile: bracket expansion failed");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi_squared_cdf(mid, k) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.size() < 100) {
    throw std::invalid_argument("ks_test: need at least 100 samples");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  // Asymptotic Kolmogorov distribution with the Stephens small-sample correction.
  const double sqrt_n = std::sqrt(n);
  const double t = d * (sqrt_n + 0.12 + 0.11 / sqrt_n);
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    p += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  p = std::min(1.0, std::max(0.0, 2.0 * p));
  return {d, p};
}

}  // namespace specsense
