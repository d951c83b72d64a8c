#include "specsense/case_c.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace specsense {
namespace case_c {

namespace {

// Monomial rows with the argument scaled to [0, 1]; keeps the shared Gram
// matrices well conditioned for orders up to a few.
Eigen::MatrixXd scaled_basis_rows(int count, int order, double scale) {
  Eigen::MatrixXd rows(count, order + 1);
  for (int t = 0; t < count; ++t) {
    double v = 1.0;
    const double x = t / scale;
    for (int i = 0; i <= order; ++i) {
      rows(t, i) = v;
      v *= x;
    }
  }
  return rows;
}

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  int a0 = -1;
  int a1 = -1;
};

// Objective ascending; ties toward the widest band, then the smallest start.
bool better(const Candidate& lhs, const Candidate& rhs) {
  if (lhs.objective != rhs.objective) return lhs.objective < rhs.objective;
  const int lw = lhs.a1 - lhs.a0;
  const int rw = rhs.a1 - rhs.a0;
  if (lw != rw) return lw > rw;
  return lhs.a0 < rhs.a0;
}

}  // namespace

SegmentFit ls_segment_error(const Eigen::VectorXd& z, int a, int b, int order) {
  if (order < 0) throw std::invalid_argument("ls_segment_error: order must be non-negative");
  if (a < 0 || b >= z.size() || a > b) {
    throw std::invalid_argument("ls_segment_error: segment out of range");
  }
  const int len = b - a + 1;
  if (len < order + 1) {
    throw std::domain_error("ls_segment_error: segment shorter than order+1");
  }
  const double scale = std::max(1, len - 1);
  const Eigen::MatrixXd h = scaled_basis_rows(len, order, scale);
  const Eigen::VectorXd seg = z.segment(a, len);
  Eigen::VectorXd mu = h.householderQr().solve(seg);
  SegmentFit fit;
  fit.error = (seg - h * mu).squaredNorm();
  // Undo the column scaling so the gains refer to the raw monomials.
  fit.gain.resize(order + 1);
  double s = 1.0;
  for (int i = 0; i <= order; ++i) {
    fit.gain(i) = mu(i) * s;
    s /= scale;
  }
  return fit;
}

BandEstimate band_search(const Eigen::VectorXd& z, int order, DpTable* table) {
  const int q_count = static_cast<int>(z.size());
  const int r = order;
  if (r < 0) throw std::invalid_argument("band_search: order must be non-negative");
  if (q_count <= r + 1) {
    throw std::invalid_argument("band_search: need more carriers than order+1");
  }

  const double scale = std::max(1, q_count - 1);
  const Eigen::MatrixXd rows = scaled_basis_rows(q_count, r, scale);

  // Shared per-length sequential-LS gains: the basis rows for a segment
  // depend only on the offset from its start, so every active start consumes
  // the same gain vector when the segment end advances.
  std::vector<Eigen::MatrixXd> p_inv(q_count);          // (H^T H)^-1 per last-row index
  std::vector<Eigen::VectorXd> k_gain(q_count);         // update gain per last-row index
  Eigen::VectorXd s_denom = Eigen::VectorXd::Ones(q_count);
  {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(r + 1, r + 1);
    for (int t = 0; t <= r; ++t) {
      gram.noalias() += rows.row(t).transpose() * rows.row(t);
    }
    p_inv[r] = gram.ldlt().solve(Eigen::MatrixXd::Identity(r + 1, r + 1));
    for (int t = r + 1; t < q_count; ++t) {
      const Eigen::VectorXd h = rows.row(t).transpose();
      const Eigen::VectorXd ph = p_inv[t - 1] * h;
      s_denom(t) = 1.0 + h.dot(ph);
      k_gain[t] = ph / s_denom(t);
      gram.noalias() += h * h.transpose();
      p_inv[t] = gram.ldlt().solve(Eigen::MatrixXd::Identity(r + 1, r + 1));
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> base_lu(rows.topRows(r + 1));

  Eigen::VectorXd prefix_ss(q_count + 1);
  prefix_ss(0) = 0.0;
  for (int q = 0; q < q_count; ++q) prefix_ss(q + 1) = prefix_ss(q) + z(q) * z(q);

  // State per segment start: running LS fit and residual.
  std::vector<Eigen::VectorXd> mu(q_count);
  Eigen::VectorXd resid = Eigen::VectorXd::Zero(q_count);

  Eigen::VectorXd e_best = Eigen::VectorXd::Constant(q_count, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> e_arg(q_count, -1);

  Candidate best;
  for (int l = r; l < q_count; ++l) {
    // New start whose minimal segment ends at l: exact interpolation.
    const int a0_new = l - r;
    mu[a0_new] = base_lu.solve(z.segment(a0_new, r + 1));
    resid(a0_new) = 0.0;

    for (int a0 = 0; a0 < a0_new; ++a0) {
      const int t = l - a0;
      const double innovation = z(l) - rows.row(t).dot(mu[a0]);
      resid(a0) += innovation * innovation / s_denom(t);
      mu[a0].noalias() += k_gain[t] * innovation;
      if ((t - r) % 64 == 0) {
        // Fresh normal-equations solve to bound accumulated drift.
        const int len = t + 1;
        const Eigen::VectorXd seg = z.segment(a0, len);
        const Eigen::VectorXd v = rows.topRows(len).transpose() * seg;
        mu[a0] = p_inv[t] * v;
        resid(a0) = (seg - rows.topRows(len) * mu[a0]).squaredNorm();
      }
    }

    double e_min = std::numeric_limits<double>::infinity();
    int e_min_arg = -1;
    for (int a0 = 0; a0 <= l - r; ++a0) {
      const double v = prefix_ss(a0) + resid(a0);
      if (v < e_min) {
        e_min = v;
        e_min_arg = a0;
      }
    }
    e_best(l) = e_min;
    e_arg[l] = e_min_arg;

    const Candidate cand{e_min + (prefix_ss(q_count) - prefix_ss(l + 1)), e_min_arg, l};
    if (better(cand, best)) best = cand;
  }

  BandEstimate estimate;
  estimate.band_first = best.a0;
  estimate.band_last = best.a1;
  estimate.objective = best.objective;
  estimate.gain = ls_segment_error(z, best.a0, best.a1, r).gain;

  if (table != nullptr) {
    table->e = e_best;
    table->argmin_a0 = e_arg;
    table->delta0_prefix = prefix_ss;
  }
  return estimate;
}

double glrt_objective(const Eigen::VectorXd& z, int a0, int a1, int order) {
  const int q_count = static_cast<int>(z.size());
  const int w = a1 - a0 + 1;
  if (a0 < 0 || a1 >= q_count || w < order + 2 || w > q_count - 1) {
    throw std::invalid_argument("glrt_objective: segment outside the evaluator's domain");
  }
  const double out_ss = z.squaredNorm() - z.segment(a0, w).squaredNorm();
  const double sigma0 = out_ss / (q_count - w);
  const double sigma1 = ls_segment_error(z, a0, a1, order).error / w;
  if (!(sigma0 > 0.0) || !(sigma1 > 0.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return 0.5 * (q_count - w) * std::log(sigma0) + 0.5 * w * std::log(sigma1);
}

BandEstimate band_search_glrt(const Eigen::VectorXd& z, int order) {
  const int q_count = static_cast<int>(z.size());
  if (q_count < order + 3) {
    throw std::invalid_argument("band_search_glrt: too few carriers");
  }
  Candidate best;
  for (int a0 = 0; a0 < q_count; ++a0) {
    for (int a1 = a0 + order + 1; a1 < q_count; ++a1) {
      if (a1 - a0 + 1 > q_count - 1) continue;
      const Candidate cand{glrt_objective(z, a0, a1, order), a0, a1};
      if (better(cand, best)) best = cand;
    }
  }
  if (best.a0 < 0) throw std::runtime_error("band_search_glrt: no admissible segment");
  BandEstimate estimate;
  estimate.band_first = best.a0;
  estimate.band_last = best.a1;
  estimate.objective = best.objective;
  estimate.gain = ls_segment_error(z, best.a0, best.a1, order).gain;
  return estimate;
}

std::string band_search_trace_json(const Eigen::VectorXd& z, const DpTable& table,
                                   const BandEstimate& estimate) {
  nlohmann::json j;
  j["z"] = std::vector<double>(z.data(), z.data() + z.size());
  j["e"] = std::vector<double>(table.e.data(), table.e.data() + table.e.size());
  j["argmin_a0"] = table.argmin_a0;
  j["delta0_prefix"] = std::vector<double>(table.delta0_prefix.data(),
                                           table.delta0_prefix.data() + table.delta0_prefix.size());
  j["q0_hat"] = estimate.band_first;
  j["q1_hat"] = estimate.band_last;
  j["objective"] = estimate.objective;
  j["gain"] = std::vector<double>(estimate.gain.data(), estimate.gain.data() + estimate.gain.size());
  return j.dump();
}

CaseCReport two_step_detect(const ofdm::ObservationBlock& obs, double alpha,
                            int order, double noise_var_est) {
  if (obs.meta.cu_active) {
    throw std::invalid_argument("two_step_detect: requires a silent cognitive system");
  }
  if (obs.meta.num_symbols < 2) {
    throw std::invalid_argument("two_step_detect: need at least two symbols to split");
  }
  const int q_count = obs.meta.num_carriers;
  const int n_search = obs.meta.num_symbols / 2;

  const auto search_block = ofdm::slice_symbols(obs, 0, n_search);
  const auto probe_block = ofdm::slice_symbols(obs, n_search, obs.meta.num_symbols);
  const auto z_search =
      case_b::build_observation(search_block, 0, q_count - 1, nullptr, noise_var_est);
  const auto z_probe =
      case_b::build_observation(probe_block, 0, q_count - 1, nullptr, noise_var_est);

  CaseCReport report;
  report.band = band_search(z_search.z, order);
  const int width = report.band.band_last - report.band.band_first + 1;
  if (width - order - 1 < 1) {
    report.short_band = true;
    report.decision = false;
    report.threshold = std::numeric_limits<double>::infinity();
    return report;
  }
  const auto model = case_b::SubspaceModel::monomial(width, order);
  const Eigen::VectorXd seg = z_probe.z.segment(report.band.band_first, width);
  const auto rep = case_b::detect(seg, model, alpha);
  report.decision = rep.decision;
  report.degenerate = rep.degenerate;
  report.statistic = rep.statistic;
  report.threshold = rep.threshold;
  return report;
}

}  // namespace case_c
}  // namespace specsense
