#include "specfic/simulate.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace specfic;

namespace {

Eigen::VectorXd theta(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

double lag_corr(const std::vector<double>& y, int k) {
  return oracles::lag_sum(y, k) / oracles::lag_sum(y, 0);
}

TEST(CounterRng, StreamsAreDeterministicAndDistinct) {
  const auto a = standard_normals(derive_stream(1, 0), 16);
  const auto b = standard_normals(derive_stream(1, 0), 16);
  const auto c = standard_normals(derive_stream(1, 1), 16);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  double mean = 0.0, var = 0.0;
  const auto z = standard_normals(derive_stream(9, 4), 20000);
  for (double v : z) mean += v;
  mean /= z.size();
  for (double v : z) var += (v - mean) * (v - mean);
  var /= z.size();
  EXPECT_NEAR(mean, 0.0, 0.03);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(SampleGaussian, DeterministicBitwise) {
  const auto family = make_arma_family(1, 0);
  const QuadratureRule q = default_quadrature(64);
  const auto f = family.spectral_density(theta({0.5, 1.0}));
  const TimeSeries a = sample_gaussian(f, 64, 12345, q);
  const TimeSeries b = sample_gaussian(f, 64, 12345, q);
  EXPECT_EQ(a.values, b.values);
  const TimeSeries c = sample_gaussian(f, 64, 12346, q);
  EXPECT_NE(a.values, c.values);
}

TEST(SampleGaussian, WhiteNoisePooledVariance) {
  const auto family = make_arma_family(0, 0);
  const QuadratureRule q = default_quadrature(500);
  const GaussianSampler sampler(family.spectral_density(theta({1.0})), 500, q);
  double acc = 0.0;
  int count = 0;
  for (int s = 0; s < 20; ++s) {
    const TimeSeries y = sampler.sample(derive_stream(7, s));
    for (double v : y.values) {
      acc += v * v;
      ++count;
    }
  }
  const double pooled = acc / count;
  EXPECT_GT(pooled, 0.9);
  EXPECT_LT(pooled, 1.1);
}

TEST(SampleGaussian, Ar1LagOneCorrelation) {
  const auto family = make_arma_family(1, 0);
  const QuadratureRule q = default_quadrature(2000);
  const TimeSeries y = sample_gaussian(
      family.spectral_density(theta({0.5, 1.0})), 2000, 31, q);
  EXPECT_NEAR(lag_corr(y.values, 1), 0.5, 0.06);
}

TEST(SampleGaussian, RejectsOversizedRequests) {
  const auto family = make_arma_family(0, 0);
  const QuadratureRule q = default_quadrature(8);
  EXPECT_THROW(
      sample_gaussian(family.spectral_density(theta({1.0})), 5001, 1, q),
      PreconditionError);
}

SimSpec small_spec(int B, int workers) {
  SimSpec spec{make_arma_family(2, 0),
               ParamVector::natural(theta({0.7, -0.6, 1.0})),
               64,
               B,
               424242,
               {CandidateModel::parametric(make_arma_family(0, 0)),
                CandidateModel::parametric(make_arma_family(2, 0)),
                CandidateModel::nonparametric()},
               {focus_lag_cov(0), focus_lag_cov(1)},
               {Comparator::kFic, Comparator::kAlwaysNp},
               workers,
               std::nullopt};
  return spec;
}

TEST(RunMc, SingleReplicationRmseIsAbsoluteError) {
  const McResult r = run_mc(small_spec(1, 1));
  ASSERT_EQ(r.replications, 1);
  ASSERT_EQ(r.aborted, 0);
  // with one replication the rmse of each candidate equals |estimate - mu|,
  // so the always-np strategy must match the NP column exactly
  for (std::size_t f = 0; f < r.focus_names.size(); ++f)
    EXPECT_EQ(r.comparator_rmse[1][f], r.rmse[f][2]);
}

TEST(RunMc, SelectionCountsSumToReplications) {
  const McResult r = run_mc(small_spec(25, 1));
  for (std::size_t k = 0; k < r.comparator_names.size(); ++k)
    for (std::size_t f = 0; f < r.focus_names.size(); ++f) {
      int total = 0;
      for (std::size_t c = 0; c < r.candidate_labels.size(); ++c)
        total += r.selection_counts[k][f][c];
      EXPECT_EQ(total, r.replications - r.aborted);
    }
}

TEST(RunMc, AlwaysNpMatchesNpColumn) {
  const McResult r = run_mc(small_spec(25, 1));
  for (std::size_t f = 0; f < r.focus_names.size(); ++f)
    EXPECT_EQ(r.comparator_rmse[1][f], r.rmse[f][2]);
}

TEST(RunMc, WorkerCountDoesNotChangeResults) {
  const McResult serial = run_mc(small_spec(24, 1));
  const McResult parallel = run_mc(small_spec(24, 3));
  EXPECT_EQ(mc_result_to_json(serial), mc_result_to_json(parallel));
  EXPECT_EQ(mc_result_to_csv(serial), mc_result_to_csv(parallel));
}

TEST(RunMc, DeterministicForFixedSpec) {
  const McResult a = run_mc(small_spec(12, 2));
  const McResult b = run_mc(small_spec(12, 2));
  EXPECT_EQ(mc_result_to_json(a), mc_result_to_json(b));
}

TEST(RunMc, TruthValuesMatchClosedForms) {
  const McResult r = run_mc(small_spec(1, 1));
  // AR(2) autocovariances from the spectral integral oracle
  const auto g = make_arma_family(2, 0).spectral_density(
      theta({0.7, -0.6, 1.0}));
  const double c0 = oracles::simpson([&](double w) { return 2.0 * g(w); },
                                     0.0, oracles::kPi);
  const double c1 = oracles::simpson(
      [&](double w) { return 2.0 * std::cos(w) * g(w); }, 0.0, oracles::kPi);
  EXPECT_NEAR(r.mu_true[0], c0, 1e-8 * std::fabs(c0));
  EXPECT_NEAR(r.mu_true[1], c1, 1e-8 * std::max(1.0, std::fabs(c1)));
}

TEST(RunMc, ValidationErrors) {
  SimSpec spec = small_spec(1, 1);
  spec.n = 4;
  EXPECT_THROW(run_mc(spec), PreconditionError);
  spec = small_spec(1, 1);
  spec.candidates.clear();
  EXPECT_THROW(run_mc(spec), PreconditionError);
  spec = small_spec(1, 1);
  spec.candidates = {CandidateModel::parametric(make_arma_family(1, 0))};
  spec.comparators = {Comparator::kAlwaysNp};
  EXPECT_THROW(run_mc(spec), PreconditionError);
}

TEST(RunMc, AicBicSelectAmongParametricOnly) {
  SimSpec spec = small_spec(10, 2);
  spec.comparators = {Comparator::kAic, Comparator::kBic};
  const McResult r = run_mc(spec);
  const int np_index = 2;
  for (std::size_t k = 0; k < r.comparator_names.size(); ++k)
    for (std::size_t f = 0; f < r.focus_names.size(); ++f)
      EXPECT_EQ(r.selection_counts[k][f][np_index], 0);
}

TEST(LeastFalseTable, TruthFamilyReproducesTruth) {
  const QuadratureRule q = default_quadrature(128);
  const auto family = make_arma_family(2, 0);
  const Eigen::VectorXd t = theta({0.7, -0.6, 1.0});
  const auto g = family.spectral_density(t);
  const auto rows = least_false_table(g, {family}, 5, q);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].converged);
  const std::vector<double> truth_cov = autocovariances(g, 5, q);
  for (int k = 0; k <= 5; ++k)
    EXPECT_NEAR(rows[0].autocov[k], truth_cov[k],
                1e-6 * std::max(1.0, std::fabs(truth_cov[k])));
}

TEST(McSerialization, LongCsvHasFixedHeader) {
  const McResult r = run_mc(small_spec(2, 1));
  const std::string csv = mc_result_to_csv(r);
  EXPECT_EQ(csv.find("focus,candidate,metric,value\n"), 0u);
  EXPECT_NE(csv.find("mu_true"), std::string::npos);
  EXPECT_NE(csv.find("selection_count_fic"), std::string::npos);
  EXPECT_NE(csv.find("rmse_always_np"), std::string::npos);
  const std::string json = mc_result_to_json(r);
  EXPECT_NE(json.find("\"version\""), std::string::npos);
  EXPECT_NE(json.find("\"seed\""), std::string::npos);
}

}  // namespace
