#include "specsense/case_b.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "specsense/numerics.hpp"

namespace specsense {
namespace case_b {

SubspaceModel::SubspaceModel(Eigen::MatrixXd basis, int order, SubspaceKind kind)
    : basis_(std::move(basis)), order_(order), kind_(kind) {
  const int b_pu = static_cast<int>(basis_.rows());
  const int cols = static_cast<int>(basis_.cols());
  if (cols != order + 1) {
    throw std::invalid_argument("SubspaceModel: basis must have order+1 columns");
  }
  if (order + 1 > b_pu - 1) {
    throw std::invalid_argument("SubspaceModel: need order+1 <= band width - 1");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis_);
  if (qr.rank() < cols) {
    throw std::invalid_argument("SubspaceModel: basis is rank deficient");
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> thin(basis_);
  orthonormal_ = thin.householderQ() * Eigen::MatrixXd::Identity(b_pu, cols);
  r_factor_ = thin.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
}

SubspaceModel SubspaceModel::monomial(int b_pu, int order) {
  if (order < 0) throw std::invalid_argument("SubspaceModel: order must be non-negative");
  if (b_pu < 2) throw std::invalid_argument("SubspaceModel: band width must be >= 2");
  Eigen::MatrixXd h(b_pu, order + 1);
  for (int n = 0; n < b_pu; ++n) {
    double v = 1.0;
    for (int i = 0; i <= order; ++i) {
      h(n, i) = v;
      v *= n;
    }
  }
  return SubspaceModel(std::move(h), order, SubspaceKind::kMonomial);
}

SubspaceModel SubspaceModel::custom(Eigen::MatrixXd basis) {
  const int order = static_cast<int>(basis.cols()) - 1;
  return SubspaceModel(std::move(basis), order, SubspaceKind::kCustom);
}

double SubspaceModel::fitted_energy(const Eigen::VectorXd& z) const {
  return (orthonormal_.transpose() * z).squaredNorm();
}

Eigen::VectorXd SubspaceModel::ls_gain(const Eigen::VectorXd& z) const {
  return r_factor_.triangularView<Eigen::Upper>().solve(orthonormal_.transpose() * z);
}

void SubspaceModel::save_csv(std::ostream& os) const {
  os << (kind_ == SubspaceKind::kMonomial ? "monomial" : "custom") << ',' << order_ << ','
     << band_width() << '\n';
  os.precision(17);
  for (int n = 0; n < band_width(); ++n) {
    for (int i = 0; i <= order_; ++i) {
      if (i > 0) os << ',';
      os << basis_(n, i);
    }
    os << '\n';
  }
}

SubspaceModel SubspaceModel::load_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("SubspaceModel: empty input");
  std::istringstream hs(header);
  std::string kind_name;
  int order = 0;
  int b_pu = 0;
  char comma = 0;
  if (!std::getline(hs, kind_name, ',')) throw std::runtime_error("SubspaceModel: bad header");
  hs >> order >> comma >> b_pu;
  if (hs.fail()) throw std::runtime_error("SubspaceModel: bad header");
  Eigen::MatrixXd h(b_pu, order + 1);
  std::string line;
  for (int n = 0; n < b_pu; ++n) {
    if (!std::getline(is, line)) throw std::runtime_error("SubspaceModel: truncated table");
    std::istringstream ls(line);
    for (int i = 0; i <= order; ++i) {
      ls >> h(n, i);
      if (i < order) ls >> comma;
    }
    if (ls.fail()) throw std::runtime_error("SubspaceModel: malformed row");
  }
  return SubspaceModel(std::move(h), order,
                       kind_name == "monomial" ? SubspaceKind::kMonomial : SubspaceKind::kCustom);
}

FrequencyObservation build_observation(const ofdm::ObservationBlock& obs,
                                       int band_first, int band_last,
                                       const Eigen::MatrixXcd* h_est,
                                       double noise_var_est) {
  const int q_count = obs.meta.num_carriers;
  const int n_count = obs.meta.num_symbols;
  if (band_first < 0 || band_last < band_first || band_last >= q_count) {
    throw std::invalid_argument("build_observation: band outside [0, Q-1]");
  }
  if (h_est != nullptr && (h_est->rows() != q_count || h_est->cols() != n_count)) {
    throw std::invalid_argument("build_observation: channel estimate dimensions do not match");
  }
  const int width = band_last - band_first + 1;
  FrequencyObservation out;
  out.band_first = band_first;
  out.zbar.resize(width);
  out.m.resize(width);
  out.z.resize(width);
  for (int qi = 0; qi < width; ++qi) {
    const int q = band_first + qi;
    out.zbar(qi) = obs.y.row(q).squaredNorm() / n_count;
    double cu_power = 0.0;
    if (h_est != nullptr) {
      cu_power = h_est->row(q).squaredNorm() / n_count;
    }
    out.m(qi) = cu_power + noise_var_est;
    out.z(qi) = out.zbar(qi) - out.m(qi);
  }
  return out;
}

double matched_subspace_statistic(const Eigen::VectorXd& z, const SubspaceModel& model) {
  if (z.size() != model.band_width()) {
    throw std::invalid_argument("matched_subspace_statistic: dimension mismatch");
  }
  const double total = z.squaredNorm();
  if (total == 0.0) {
    throw std::invalid_argument("matched_subspace_statistic: observation is identically zero");
  }
  const int b_pu = model.band_width();
  const int r = model.order();
  const double fitted = model.fitted_energy(z);
  const double residual = total - fitted;
  if (residual <= 1e-12 * total) {
    return std::numeric_limits<double>::infinity();
  }
  return (static_cast<double>(b_pu - r - 1) / (r + 1)) * fitted / residual;
}

double threshold_from_alpha(double alpha, int order, int b_pu) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("threshold_from_alpha: alpha must lie in (0, 1)");
  }
  if (b_pu - order - 1 < 1) {
    throw std::invalid_argument("threshold_from_alpha: need b_pu - r - 1 >= 1");
  }
  return f_quantile(1.0 - alpha, order + 1, b_pu - order - 1);
}

double predicted_detection_probability(double gamma, int order, int b_pu, double lambda) {
  if (b_pu - order - 1 < 1) {
    throw std::invalid_argument("predicted_detection_probability: need b_pu - r - 1 >= 1");
  }
  return noncentral_f_sf(gamma, order + 1, b_pu - order - 1, lambda);
}

CaseBReport detect(const Eigen::VectorXd& z, const SubspaceModel& model, double alpha) {
  CaseBReport report;
  report.threshold = threshold_from_alpha(alpha, model.order(), model.band_width());
  report.statistic = matched_subspace_statistic(z, model);
  report.degenerate = std::isinf(report.statistic);
  // An observation inside the signal subspace has unbounded likelihood ratio.
  report.decision = report.degenerate || report.statistic > report.threshold;
  return report;
}

}  // namespace case_b
}  // namespace specsense
