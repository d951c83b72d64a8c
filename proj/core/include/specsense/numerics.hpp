#ifndef SPECSENSE_NUMERICS_HPP
#define SPECSENSE_NUMERICS_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace specsense {

/// Counter-keyed random stream. Streams built from the same (seed, stream)
/// pair produce identical sequences; distinct stream ids give statistically
/// independent sequences, so Monte-Carlo trials can be assigned one stream
/// each and the results do not depend on how trials are scheduled.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Standard normal via Box-Muller (second deviate cached).
  double gaussian();

  /// Circular complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_gaussian(double variance);

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);

  /// Independent child stream; deterministic in (this stream's identity, id).
  RngStream substream(std::uint64_t id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending,
/// eigenvectors orthonormal in the columns of `vectors`.
struct EigenSystem {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

/// Decomposes a Hermitian matrix. Throws std::invalid_argument if the input
/// is not Hermitian to within 1e-9 relative Frobenius error.
EigenSystem hermitian_eig(const Eigen::MatrixXcd& a);

/// Gaussian right-tail probability Q(x) = P{N(0,1) > x}.
double gaussian_q(double x);

/// Inverse of gaussian_q, accurate to ~1e-14 in x over p in (0, 1).
double gaussian_q_inv(double p);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Central F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);
double f_sf(double x, double d1, double d2);
double f_quantile(double p, double d1, double d2);

/// Right-tail probability of the noncentral F distribution, evaluated as a
/// Poisson(lambda/2) mixture of incomplete beta terms. Terms are added until
/// the truncated Poisson mass falls below 1e-12.
double noncentral_f_sf(double x, double d1, double d2, double lambda);

/// Chi-square distribution with k degrees of freedom.
double chi_squared_cdf(double x, double k);
double chi_squared_quantile(double p, double k);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov test against a reference CDF, asymptotic
/// p-value. Requires at least 100 samples.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace specsense

#endif  // SPECSENSE_NUMERICS_HPP
