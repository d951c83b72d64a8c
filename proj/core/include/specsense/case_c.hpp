#ifndef SPECSENSE_CASE_C_HPP
#define SPECSENSE_CASE_C_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specsense/case_b.hpp"
#include "specsense/ofdm.hpp"

namespace specsense {
namespace case_c {

/// Estimated occupied band with the attained least-squares objective.
struct BandEstimate {
  int band_first = 0;   ///< q0_hat
  int band_last = 0;    ///< q1_hat
  double objective = 0.0;
  Eigen::VectorXd gain;  ///< LS-fitted power-profile coefficients over the band
};

/// Intermediate dynamic-programming state, exposed for tracing.
struct DpTable {
  Eigen::VectorXd e;              ///< prefix objective, valid for l >= order
  std::vector<int> argmin_a0;     ///< best segment start per l, -1 below order
  Eigen::VectorXd delta0_prefix;  ///< cumulative sums of z(q)^2, size Q+1
};

struct SegmentFit {
  double error = 0.0;   ///< ||z_seg - H mu||^2
  Eigen::VectorXd gain; ///< mu, raw monomial basis
};

/// Least-squares fit of the order-r monomial profile to z[a..b]; the basis is
/// anchored at the segment start, h_i(q - a) = (q - a)^i.
SegmentFit ls_segment_error(const Eigen::VectorXd& z, int a, int b, int order);

/// Global minimizer of
///   sum_{q outside [a0,a1]} z(q)^2 + sum_{q in [a0,a1]} (z(q) - fit)^2
/// over all segments of length >= order+1, found by dynamic programming with
/// shared sequential-LS gains. Ties resolve toward the widest band, then the
/// smallest start. Exact: matches exhaustive search of the same objective.
BandEstimate band_search(const Eigen::VectorXd& z, int order, DpTable* table = nullptr);

/// Reference evaluator of the unsimplified ML band objective
/// (Q-w)/2 log sigma0^2 + w/2 log sigma1^2; meaningful for segments with
/// w in [order+2, Q-1] where both variance estimates exist.
double glrt_objective(const Eigen::VectorXd& z, int a0, int a1, int order);

/// Exhaustive minimizer of glrt_objective, intended for small Q only.
BandEstimate band_search_glrt(const Eigen::VectorXd& z, int order);

/// Single-line JSON dump of a band-search run for offline inspection.
std::string band_search_trace_json(const Eigen::VectorXd& z, const DpTable& table,
                                   const BandEstimate& estimate);

struct CaseCReport {
  bool decision = false;
  bool short_band = false;  ///< estimated band too narrow for the F test
  bool degenerate = false;  ///< detection-stage observation inside the subspace
  BandEstimate band;
  double statistic = 0.0;
  double threshold = 0.0;
};

/// Blind two-step detection: the first half of the block drives the band
/// search, the second half feeds the matched-subspace test on the estimated
/// band with the per-band F threshold, so the detection stage is independent
/// of the selection stage and the false-alarm constraint holds conditionally
/// on any returned band. Requires a silent cognitive system.
CaseCReport two_step_detect(const ofdm::ObservationBlock& obs, double alpha,
                            int order, double noise_var_est);

}  // namespace case_c
}  // namespace specsense

#endif  // SPECSENSE_CASE_C_HPP
