#ifndef SPECSENSE_HARNESS_HPP
#define SPECSENSE_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specsense/case_a.hpp"
#include "specsense/case_b.hpp"
#include "specsense/case_c.hpp"
#include "specsense/config.hpp"
#include "specsense/ofdm.hpp"
#include "specsense/pu_models.hpp"

namespace specsense {
namespace harness {

enum class Scenario {
  kCaseARoc,       ///< per-carrier ROC of energy / LMP / estimator-correlator
  kCaseBRoc,       ///< matched-subspace detection rate over an alpha grid
  kCaseBPdVsSnr,   ///< matched-subspace detection rate vs SNR, CU transmitting
  kCaseCHitRate,   ///< band-search hit percentage vs SNR and bandwidth
  kCaseCEndToEnd,  ///< two-step blind detection: false alarm and detection rate
};

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario scenario);

/// PU propagation channel used by a campaign. Zero paths means a
/// frequency-flat deterministic channel (constant received power); otherwise
/// a fresh tapped-delay-line realization is drawn per trial.
struct ChannelSpec {
  int num_paths = 0;
  ofdm::PowerProfile profile = ofdm::PowerProfile::kUniform;
  double decay = 0.0;
};

struct CampaignConfig {
  Scenario scenario = Scenario::kCaseARoc;
  ofdm::OfdmConfig system;
  std::optional<pu::TonalPuConfig> tonal;  ///< exactly one PU model must be set
  std::optional<pu::ArPuConfig> ar;
  ChannelSpec channel;
  std::vector<double> snr_grid_db;
  std::vector<double> alpha_grid;
  int trials = 1000;
  std::uint64_t seed = 1;

  int carrier = -1;         ///< case_a_roc tested carrier; -1 = band centre
  int subspace_order = 1;   ///< r for cases B and C
  std::vector<int> b_pu_grid;  ///< case_c_hit_rate bandwidths; default band width
  double cu_snr_db = 8.0;   ///< CU power over AWGN when the CU transmits
  double h_est_error = 0.0; ///< variance of the additive channel-estimate error

  void validate() const;
};

/// One Monte-Carlo estimate at one grid point.
struct ResultRow {
  std::string scenario;
  double snr_db = 0.0;
  double alpha = 0.0;
  int b_pu = 0;
  int r = -1;
  int n = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
};

std::vector<ResultRow> run_campaign(const CampaignConfig& cfg);

/// CSV with header scenario,snr_db,alpha,b_pu,r,n,estimate,stderr,trials,seed.
/// The optional leading comment line carries a timestamp and is the only
/// non-reproducible output.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& os,
               bool with_timestamp = true);

CampaignConfig campaign_from_config(const Config& file);

/// Observation interchange: one line per carrier, 2N comma-separated values
/// (real, imag per symbol).
void write_observation_csv(const ofdm::ObservationBlock& obs, std::ostream& os);
ofdm::ObservationBlock read_observation_csv(std::istream& is, const ofdm::OfdmConfig& meta);

}  // namespace harness
}  // namespace specsense

#endif  // SPECSENSE_HARNESS_HPP
