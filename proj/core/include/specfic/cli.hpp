#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfic/detrend.hpp"
#include "specfic/fic.hpp"
#include "specfic/periodogram.hpp"
#include "specfic/simulate.hpp"

namespace specfic {

/// Candidate description as it appears in config files:
/// {"family": "ar"|"ma"|"arma"|"np", "order": k} or explicit ar/ma orders.
struct CandidateSpec {
  std::string family;
  int ar = 0;
  int ma = 0;
  std::optional<std::string> label;
};

/// Focus description: constructor name plus parameters.
struct FocusSpec {
  std::string type;  // lag_cov | lag_corr | band_mass | threshold_prob
  int lag = 0;
  double a = 0.0;
  double b = 0.0;
  double threshold = 0.0;
  std::vector<double> cond_values;
};

struct TruthSpec {
  CandidateSpec family;
  std::vector<double> theta;  // natural encoding
};

struct DetrendSpec {
  std::string kind;  // mean_only | linear_time | harmonic | custom
  std::vector<int> periods;
  std::string path;  // design CSV for custom
};

/// Fully resolved run configuration. Parsing is strict: unknown keys are
/// rejected, and every run echoes the resolved config into the output
/// directory for reproducibility.
struct RunConfig {
  std::string command;  // fit | fic | afic | simulate | mc | least-false | reproduce
  std::string input;
  std::string out = "specfic-out";
  std::vector<CandidateSpec> candidates;
  std::vector<FocusSpec> foci;
  std::vector<double> weights;  // afic; aligned with foci
  std::optional<DetrendSpec> detrend;
  std::optional<TruthSpec> truth;
  std::vector<std::string> comparators;
  std::uint64_t seed = 1;
  int B = 2000;
  int n = 100;
  int workers = 1;
  std::optional<int> quad_nodes;
  std::string figure;  // reproduce target: fig1 | fig3 | fig4 | fig5 | fig6

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text(int indent = 2) const;
};

/// Reads a one-column numeric CSV (optional header, LF or CRLF). Rejects
/// NaN/Inf and non-numeric cells with a row-numbered ParseError.
TimeSeries ingest_csv(const std::string& path);

/// Multi-column numeric CSV, one column per regressor.
Eigen::MatrixXd load_design_csv(const std::string& path);

ParametricSpectralFamily family_from_spec(const CandidateSpec& spec);
CandidateModel candidate_from_spec(const CandidateSpec& spec);
FocusFunctional focus_from_spec(const FocusSpec& spec);
TrendDesign design_from_spec(const DetrendSpec& spec, int n);

/// Dispatches a config to its command. Returns the process exit code:
/// 0 success, 1 configuration error, 2 completed with per-candidate
/// failures (partial report written). Human-readable progress goes to os.
int run_command(const RunConfig& config, std::ostream& os);

}  // namespace specfic
