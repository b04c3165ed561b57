#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfic/errors.hpp"

namespace specfic {

/// A bounded, piecewise continuous weight function on [-pi, pi].
///
/// Focus parameters are built from integrals of such weights against a
/// spectral measure. Integration routines pair the even part of the weight
/// against symmetric densities, so odd components never contribute.
class FocusWeight {
 public:
  FocusWeight(std::function<double(double)> evaluate, double bound,
              std::vector<double> jump_points = {}, bool symmetric = true);

  double operator()(double omega) const { return evaluate_(omega); }

  /// Even part (h(w) + h(-w))/2; identical to h for symmetric weights.
  double even(double omega) const {
    return symmetric_ ? evaluate_(omega)
                      : 0.5 * (evaluate_(omega) + evaluate_(-omega));
  }

  double bound() const { return bound_; }
  bool symmetric() const { return symmetric_; }
  const std::vector<double>& jump_points() const { return jump_points_; }

 private:
  std::function<double(double)> evaluate_;
  std::vector<double> jump_points_;  // sorted discontinuities in [-pi, pi]
  bool symmetric_;
  double bound_;
};

/// cos(k w); the weight whose spectral integral is the lag-k autocovariance.
FocusWeight cosine_weight(int lag);

/// The constant weight 1.
FocusWeight unit_weight();

/// A focus parameter: a smooth transform H of finitely many linear spectral
/// functionals x_j = int h_j dG, together with the gradient of H.
class FocusFunctional {
 public:
  using Transform = std::function<double(const Eigen::VectorXd&)>;
  using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  FocusFunctional(std::string name, std::vector<FocusWeight> weights,
                  Transform transform, Gradient grad_transform);

  int k() const { return static_cast<int>(weights_.size()); }
  const std::vector<FocusWeight>& weights() const { return weights_; }
  const std::string& name() const { return name_; }

  /// H applied to the component vector. Throws DomainError where H is
  /// undefined; the message names the functional and offending component.
  double transform(const Eigen::VectorXd& components) const;
  Eigen::VectorXd grad_transform(const Eigen::VectorXd& components) const;

 private:
  std::string name_;
  std::vector<FocusWeight> weights_;
  Transform transform_;
  Gradient grad_;
};

/// Lag-k autocovariance C(k). H is the identity.
FocusFunctional focus_lag_cov(int lag);

/// Lag-k autocorrelation C(k)/C(0). Requires lag >= 1.
FocusFunctional focus_lag_corr(int lag);

/// One-sided band mass int_a^b g(w) dw over [a, b) in [0, pi].
FocusFunctional focus_band_mass(double a, double b);

/// Upper-tail probability P{Y_{n+1} >= y | Y_{n-k} = c_0, ..., Y_n = c_k}
/// under the Gaussian law implied by the covariances C(0..k+1).
/// cond_values are the conditioning values, oldest first.
FocusFunctional focus_threshold_prob(double y_threshold,
                                     const std::vector<double>& cond_values);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace specfic
