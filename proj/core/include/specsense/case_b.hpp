#ifndef SPECSENSE_CASE_B_HPP
#define SPECSENSE_CASE_B_HPP

#include <iosfwd>

#include <Eigen/Dense>

#include "specsense/ofdm.hpp"

namespace specsense {
namespace case_b {

enum class SubspaceKind { kMonomial, kCustom };

/// Known signal subspace for the per-carrier power profile across the band:
/// columns h_0..h_r of a full-rank B_PU x (r+1) basis. The raw basis is kept
/// for reporting; projections go through an orthonormalized copy, which
/// leaves the statistic unchanged and avoids the conditioning of raw
/// monomials at higher orders.
class SubspaceModel {
 public:
  /// h_i(n) = n^i, n = 0..b_pu-1.
  static SubspaceModel monomial(int b_pu, int order);
  static SubspaceModel custom(Eigen::MatrixXd basis);

  int order() const { return order_; }
  int band_width() const { return static_cast<int>(basis_.rows()); }
  SubspaceKind kind() const { return kind_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  /// ||P_H z||^2.
  double fitted_energy(const Eigen::VectorXd& z) const;
  /// Least-squares gain in the raw basis.
  Eigen::VectorXd ls_gain(const Eigen::VectorXd& z) const;

  void save_csv(std::ostream& os) const;
  static SubspaceModel load_csv(std::istream& is);

 private:
  SubspaceModel(Eigen::MatrixXd basis, int order, SubspaceKind kind);

  Eigen::MatrixXd basis_;        // raw columns
  Eigen::MatrixXd orthonormal_;  // thin Q of the basis
  Eigen::MatrixXd r_factor_;     // R of the thin QR, for gain recovery
  int order_ = 0;
  SubspaceKind kind_ = SubspaceKind::kMonomial;
};

/// Mean-subtracted periodogram observation over a carrier band.
struct FrequencyObservation {
  int band_first = 0;
  Eigen::VectorXd z;     ///< zbar - m
  Eigen::VectorXd zbar;  ///< per-carrier periodogram, >= 0
  Eigen::VectorXd m;     ///< subtracted mean, CU power estimate + noise estimate
};

/// Builds Z(q) = (1/N) ||Y_q||^2 - m(q) with m(q) = (1/N) sum_n |Hhat_q(n)|^2
/// + noise_var_est. Pass h_est = nullptr when the cognitive system is silent.
FrequencyObservation build_observation(const ofdm::ObservationBlock& obs,
                                       int band_first, int band_last,
                                       const Eigen::MatrixXcd* h_est,
                                       double noise_var_est);

/// Matched subspace statistic
///   T = [(B_PU - r - 1)/(r + 1)] (z^T P_H z) / (z^T (I - P_H) z).
/// Scale-invariant; F(r+1, B_PU-r-1) distributed under white noise. Returns
/// +infinity when z lies in the signal subspace (degenerate denominator).
double matched_subspace_statistic(const Eigen::VectorXd& z, const SubspaceModel& model);

/// Upper-alpha quantile of F(r+1, b_pu-r-1).
double threshold_from_alpha(double alpha, int order, int b_pu);

/// Right tail of the noncentral F at the given threshold; lambda is the
/// noncentrality sum of squared PU contributions over noise variance.
double predicted_detection_probability(double gamma, int order, int b_pu, double lambda);

struct CaseBReport {
  bool decision = false;
  double statistic = 0.0;
  double threshold = 0.0;
  bool degenerate = false;  ///< z was inside the signal subspace
};

CaseBReport detect(const Eigen::VectorXd& z, const SubspaceModel& model, double alpha);

}  // namespace case_b
}  // namespace specsense

#endif  // SPECSENSE_CASE_B_HPP
