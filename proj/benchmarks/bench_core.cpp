#include <benchmark/benchmark.h>

#include "specfic/estimation.hpp"
#include "specfic/fic.hpp"
#include "specfic/periodogram.hpp"
#include "specfic/simulate.hpp"
#include "specfic/spectral.hpp"

using namespace specfic;

namespace {

TimeSeries ar1_series(int n, std::uint64_t seed) {
  const auto family = make_arma_family(1, 0);
  Eigen::VectorXd theta(2);
  theta << 0.6, 1.0;
  return sample_gaussian(family.spectral_density(theta), n, seed,
                         default_quadrature(n));
}

void PeriodogramGrid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TimeSeries y = ar1_series(n, 7);
  const QuadratureRule q = default_quadrature(n);
  for (auto _ : state) {
    EmpiricalSpectrum spec(y, q);
    benchmark::DoNotOptimize(spec.grid_values().data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(PeriodogramGrid)->Arg(100)->Arg(500)->Arg(2000)->Complexity();

void WhittleFitAr1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TimeSeries y = ar1_series(n, 11);
  const QuadratureRule q = default_quadrature(n);
  const auto family = make_arma_family(1, 0);
  for (auto _ : state) {
    FitResult fit = fit_whittle(y, family, q);
    benchmark::DoNotOptimize(fit.theta_hat.values.data());
  }
}
BENCHMARK(WhittleFitAr1)->Arg(100)->Arg(500)->Arg(1000);

void GaussianSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto family = make_arma_family(1, 0);
  Eigen::VectorXd theta(2);
  theta << 0.6, 1.0;
  const QuadratureRule q = default_quadrature(n);
  const GaussianSampler sampler(family.spectral_density(theta), n, q);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    TimeSeries y = sampler.sample(seed++);
    benchmark::DoNotOptimize(y.values.data());
  }
}
BENCHMARK(GaussianSample)->Arg(250)->Arg(1000);

void FicScoresSmall(benchmark::State& state) {
  const TimeSeries y = ar1_series(100, 23);
  const QuadratureRule q = default_quadrature(100);
  const std::vector<CandidateModel> candidates = {
      CandidateModel::parametric(make_arma_family(1, 0)),
      CandidateModel::nonparametric()};
  const FocusFunctional focus = focus_lag_cov(1);
  for (auto _ : state) {
    FicReport report = fic_scores(y, candidates, focus, q);
    benchmark::DoNotOptimize(report.rows.data());
  }
}
BENCHMARK(FicScoresSmall);

}  // namespace

BENCHMARK_MAIN();
