#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfic/errors.hpp"
#include "specfic/periodogram.hpp"

namespace specfic {

/// A trend design matrix for OLS detrending. Construction validates full
/// column rank (smallest singular value > 1e-10 times the largest).
class TrendDesign {
 public:
  static TrendDesign mean_only(int n);
  static TrendDesign linear_time(int n);
  /// Intercept plus cos/sin pairs at the given seasonal periods.
  static TrendDesign harmonic(int n, const std::vector<int>& periods);
  static TrendDesign custom(Eigen::MatrixXd X);

  const Eigen::MatrixXd& matrix() const { return X_; }
  const std::string& kind() const { return kind_; }
  int n() const { return static_cast<int>(X_.rows()); }
  int dim() const { return static_cast<int>(X_.cols()); }

 private:
  TrendDesign(Eigen::MatrixXd X, std::string kind);
  Eigen::MatrixXd X_;
  std::string kind_;
};

struct OlsFit {
  Eigen::VectorXd beta_hat;
  TimeSeries residuals;
};

/// beta_hat = argmin |y - X beta|^2 via QR; residuals carry the fit.
OlsFit fit_ols(const TimeSeries& y, const TrendDesign& design);

/// Removes the fitted trend and returns the residual series, tagged as
/// detrended. Downstream estimation treats it like any stationary series.
TimeSeries detrend_pipeline(const TimeSeries& y, const TrendDesign& design);

}  // namespace specfic
