#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfic/fic.hpp"
#include "specfic/periodogram.hpp"
#include "specfic/spectral.hpp"

namespace specfic {

enum class Comparator { kFic, kAic, kBic, kAlwaysNp };

std::string comparator_name(Comparator c);

/// A seeded Monte Carlo experiment: simulate series from a known truth,
/// estimate each focus under each candidate, and score the selection
/// strategies. Identical specs (including the seed) give identical results.
struct SimSpec {
  ParametricSpectralFamily truth_family;
  ParamVector truth_theta;
  int n = 0;
  int replications = 1;
  std::uint64_t seed = 0;
  std::vector<CandidateModel> candidates;
  std::vector<FocusFunctional> foci;
  std::vector<Comparator> comparators;
  int workers = 1;
  std::optional<int> quad_nodes;  // override for default_quadrature(n)
};

struct McResult {
  std::vector<std::string> focus_names;
  std::vector<std::string> candidate_labels;
  std::vector<std::string> comparator_names;
  std::vector<double> mu_true;               // per focus
  std::vector<std::vector<double>> rmse;     // [focus][candidate]
  std::vector<std::vector<int>> valid_count; // [focus][candidate]
  // selection_counts[comparator][focus][candidate]
  std::vector<std::vector<std::vector<int>>> selection_counts;
  std::vector<std::vector<double>> comparator_rmse;  // [comparator][focus]
  std::vector<std::vector<int>> failure_count;       // [focus][candidate]
  int replications = 0;
  int aborted = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int quad_size = 0;
  std::string version;
  std::vector<std::string> messages;  // first few per-replication errors
};

/// Deterministic sub-stream seed for replication r of a master seed.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

/// count iid standard normals from a counter-based stream (SplitMix64
/// uniforms through the Box-Muller map): platform independent, and
/// independent draws for distinct stream values.
std::vector<double> standard_normals(std::uint64_t stream, int count);

/// Exact stationary Gaussian draw: y = L z with L the Cholesky factor of
/// the n x n Toeplitz covariance built from autocovariance(f, 0..n-1).
/// Bit-identical for a fixed seed. n <= 5000.
TimeSeries sample_gaussian(const SpectralDensity& f, int n,
                           std::uint64_t seed, const QuadratureRule& q);

/// Same draw path as sample_gaussian with the Toeplitz factorization cached
/// across seeds. Immutable after construction; safe to share across workers.
class GaussianSampler {
 public:
  GaussianSampler(const SpectralDensity& f, int n, const QuadratureRule& q);
  TimeSeries sample(std::uint64_t seed) const;
  int n() const { return n_; }

 private:
  int n_;
  Eigen::MatrixXd chol_;  // lower factor
};

McResult run_mc(const SimSpec& spec);

std::string mc_result_to_json(const McResult& result, int indent = 2);
/// Long-format table with fixed headers: focus, candidate, metric, value.
std::string mc_result_to_csv(const McResult& result);

struct LeastFalseRow {
  std::string family_label;
  Eigen::VectorXd theta0;       // natural encoding
  double discrepancy = 0.0;     // attained minimum
  std::vector<double> autocov;  // C(0..max_lag) under f_theta0
  bool converged = false;
};

/// For each family, minimizes the Whittle divergence to the truth and
/// tabulates the implied autocovariances at lags 0..max_lag.
std::vector<LeastFalseRow> least_false_table(
    const SpectralDensity& truth,
    const std::vector<ParametricSpectralFamily>& families, int max_lag,
    const QuadratureRule& q);

}  // namespace specfic
