#include "specfic/detrend.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace specfic {

namespace {

void check_full_rank(const Eigen::MatrixXd& X, const std::string& kind) {
  if (X.rows() == 0 || X.cols() == 0)
    throw DesignError("trend design '" + kind + "' is empty");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0)))
    throw DesignError("trend design '" + kind + "' is rank deficient");
}

}  // namespace

TrendDesign::TrendDesign(Eigen::MatrixXd X, std::string kind)
    : X_(std::move(X)), kind_(std::move(kind)) {
  check_full_rank(X_, kind_);
}

TrendDesign TrendDesign::mean_only(int n) {
  if (n < 1) throw DesignError("mean_only: need n >= 1");
  return TrendDesign(Eigen::MatrixXd::Ones(n, 1), "mean_only");
}

TrendDesign TrendDesign::linear_time(int n) {
  if (n < 2) throw DesignError("linear_time: need n >= 2");
  Eigen::MatrixXd X(n, 2);
  for (int t = 0; t < n; ++t) {
    X(t, 0) = 1.0;
    X(t, 1) = t + 1;
  }
  return TrendDesign(std::move(X), "linear_time");
}

TrendDesign TrendDesign::harmonic(int n, const std::vector<int>& periods) {
  if (periods.empty()) throw DesignError("harmonic: need at least one period");
  Eigen::MatrixXd X(n, 1 + 2 * static_cast<int>(periods.size()));
  X.col(0).setOnes();
  int col = 1;
  for (int s : periods) {
    if (s < 2) throw DesignError("harmonic: periods must be >= 2");
    for (int t = 0; t < n; ++t) {
      const double phase = 2.0 * std::numbers::pi * (t + 1) / s;
      X(t, col) = std::cos(phase);
      X(t, col + 1) = std::sin(phase);
    }
    col += 2;
  }
  return TrendDesign(std::move(X), "harmonic");
}

TrendDesign TrendDesign::custom(Eigen::MatrixXd X) {
  return TrendDesign(std::move(X), "custom");
}

OlsFit fit_ols(const TimeSeries& y, const TrendDesign& design) {
  const Eigen::MatrixXd& X = design.matrix();
  if (y.n() != design.n())
    throw DesignError("fit_ols: series length does not match design rows");
  if (y.n() <= design.dim())
    throw PreconditionError("fit_ols: need n > design dimension");
  Eigen::Map<const Eigen::VectorXd> yv(y.values.data(), y.n());
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(yv);
  const Eigen::VectorXd resid = yv - X * beta;
  TimeSeries out;
  out.values.assign(resid.data(), resid.data() + resid.size());
  out.detrended = true;
  return {beta, std::move(out)};
}

TimeSeries detrend_pipeline(const TimeSeries& y, const TrendDesign& design) {
  return fit_ols(y, design).residuals;
}

}  // namespace specfic
