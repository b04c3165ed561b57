#include "specfic/focus.hpp"

#include <cmath>
#include <utility>

namespace specfic {

FocusWeight::FocusWeight(std::function<double(double)> evaluate, double bound,
                         std::vector<double> jump_points, bool symmetric)
    : evaluate_(std::move(evaluate)),
      jump_points_(std::move(jump_points)),
      symmetric_(symmetric),
      bound_(bound) {}

FocusWeight cosine_weight(int lag) {
  return FocusWeight([lag](double w) { return std::cos(lag * w); }, 1.0);
}

FocusWeight unit_weight() {
  return FocusWeight([](double) { return 1.0; }, 1.0);
}

FocusFunctional::FocusFunctional(std::string name,
                                 std::vector<FocusWeight> weights,
                                 Transform transform, Gradient grad_transform)
    : name_(std::move(name)),
      weights_(std::move(weights)),
      transform_(std::move(transform)),
      grad_(std::move(grad_transform)) {
  if (weights_.empty())
    throw PreconditionError("focus functional needs at least one weight");
}

double FocusFunctional::transform(const Eigen::VectorXd& components) const {
  return transform_(components);
}

Eigen::VectorXd FocusFunctional::grad_transform(
    const Eigen::VectorXd& components) const {
  return grad_(components);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

FocusFunctional focus_lag_cov(int lag) {
  if (lag < 0) throw PreconditionError("focus_lag_cov: lag must be >= 0");
  const std::string name = "lag_cov(" + std::to_string(lag) + ")";
  return FocusFunctional(
      name, {cosine_weight(lag)},
      [](const Eigen::VectorXd& x) { return x[0]; },
      [](const Eigen::VectorXd&) { return Eigen::VectorXd::Ones(1); });
}

FocusFunctional focus_lag_corr(int lag) {
  if (lag < 1) throw PreconditionError("focus_lag_corr: lag must be >= 1");
  const std::string name = "lag_corr(" + std::to_string(lag) + ")";
  auto transform = [name](const Eigen::VectorXd& x) {
    if (!(x[1] > 0.0))
      throw DomainError(name + ": nonpositive variance component x2");
    return x[0] / x[1];
  };
  auto grad = [name](const Eigen::VectorXd& x) {
    if (!(x[1] > 0.0))
      throw DomainError(name + ": nonpositive variance component x2");
    Eigen::VectorXd g(2);
    g << 1.0 / x[1], -x[0] / (x[1] * x[1]);
    return g;
  };
  return FocusFunctional(name, {cosine_weight(lag), unit_weight()},
                         transform, grad);
}

FocusFunctional focus_band_mass(double a, double b) {
  if (!(a >= 0.0 && a < b && b <= M_PI))
    throw PreconditionError("focus_band_mass: need 0 <= a < b <= pi");
  const std::string name = "band_mass(" + std::to_string(a) + ";" +
                           std::to_string(b) + ")";
  // One-sided mass over [a, b): the half weight applied on both sides of
  // the origin integrates the symmetric density over the band once.
  FocusWeight h(
      [a, b](double w) {
        const double aw = std::fabs(w);
        return (aw >= a && aw < b) ? 0.5 : 0.0;
      },
      0.5, {-b, -a, a, b});
  return FocusFunctional(
      name, {std::move(h)},
      [](const Eigen::VectorXd& x) { return x[0]; },
      [](const Eigen::VectorXd&) { return Eigen::VectorXd::Ones(1); });
}

namespace {

// Gaussian conditional tail probability from the covariances x = C(0..k+1)
// of (Y_{n-k}, ..., Y_n, Y_{n+1}) given the first k+1 coordinates.
double threshold_transform(const std::string& name, double y_threshold,
                           const Eigen::VectorXd& cond,
                           const Eigen::VectorXd& x) {
  const int m = static_cast<int>(cond.size());  // conditioning block size
  if (!(x[0] > 0.0))
    throw DomainError(name + ": infeasible-covariance (C(0) <= 0)");
  Eigen::MatrixXd sigma11(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sigma11(i, j) = x[std::abs(i - j)];
  Eigen::VectorXd sigma12(m);
  for (int i = 0; i < m; ++i) sigma12[i] = x[m - i];
  Eigen::LLT<Eigen::MatrixXd> llt(sigma11);
  if (llt.info() != Eigen::Success)
    throw DomainError(name + ": infeasible-covariance (conditioning block)");
  const Eigen::VectorXd w = llt.solve(sigma12);
  const double mean_c = w.dot(cond);
  const double var_c = x[0] - w.dot(sigma12);
  if (!(var_c > 0.0) || !std::isfinite(mean_c))
    throw DomainError(name + ": infeasible-covariance (conditional variance)");
  return 1.0 - normal_cdf((y_threshold - mean_c) / std::sqrt(var_c));
}

}  // namespace

FocusFunctional focus_threshold_prob(double y_threshold,
                                     const std::vector<double>& cond_values) {
  if (cond_values.empty())
    throw PreconditionError(
        "focus_threshold_prob: need at least one conditioning value");
  const int k = static_cast<int>(cond_values.size()) - 1;
  const std::string name =
      "threshold_prob(" + std::to_string(y_threshold) + ";k=" +
      std::to_string(k) + ")";
  Eigen::VectorXd cond(cond_values.size());
  for (std::size_t i = 0; i < cond_values.size(); ++i) cond[i] = cond_values[i];

  std::vector<FocusWeight> weights;
  for (int j = 0; j <= k + 1; ++j) weights.push_back(cosine_weight(j));

  auto transform = [name, y_threshold, cond](const Eigen::VectorXd& x) {
    return threshold_transform(name, y_threshold, cond, x);
  };
  // Central differences; the covariance structure makes analytic matrix
  // calculus unrewarding at these dimensions.
  auto grad = [transform](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    for (int j = 0; j < x.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::fabs(x[j]));
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      g[j] = (transform(xp) - transform(xm)) / (2.0 * h);
    }
    return g;
  };
  return FocusFunctional(name, std::move(weights), transform, grad);
}

}  // namespace specfic
