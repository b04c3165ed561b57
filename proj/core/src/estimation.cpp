#include "specfic/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "optimize.hpp"

namespace specfic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDensityFloor = 1e-300;
const double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_series(const TimeSeries& y, int p) {
  if (y.n() < p + 2)
    throw PreconditionError("fit: need n >= p + 2 observations");
  const auto [lo, hi] =
      std::minmax_element(y.values.begin(), y.values.end());
  if (*lo == *hi)
    throw DegenerateInputError("fit: constant series has no spectral content");
}

// -(n/2)[log 2pi + (1/pi) sum w log(2pi f) + (1/pi) sum w I/f], or -inf when
// the density collapses below the floor at some node.
double whittle_value(const std::vector<double>& f_grid,
                     const std::vector<double>& peri_grid,
                     const QuadratureRule& q, int n) {
  double log_term = 0.0, ratio_term = 0.0;
  const std::vector<double>& w = q.weights();
  for (std::size_t i = 0; i < f_grid.size(); ++i) {
    const double f = f_grid[i];
    if (!(f >= kDensityFloor)) return -kInf;
    log_term += w[i] * std::log(2.0 * kPi * f);
    ratio_term += w[i] * peri_grid[i] / f;
  }
  return -0.5 * n *
         (std::log(2.0 * kPi) + (log_term + ratio_term) / kPi);
}

// Exact zero-mean Gaussian log-likelihood through the Durbin-Levinson
// innovations recursion; -inf when the implied covariance is not PD.
double dl_gaussian_loglik(const std::vector<double>& y,
                          const std::vector<double>& acov) {
  const int n = static_cast<int>(y.size());
  double v = acov[0];
  if (!(v > 0.0)) return -kInf;
  double ll = -0.5 * n * std::log(2.0 * kPi);
  ll -= 0.5 * (std::log(v) + y[0] * y[0] / v);
  std::vector<double> phi(n - 1, 0.0), prev(n - 1, 0.0);
  for (int t = 1; t < n; ++t) {
    double acc = acov[t];
    for (int j = 1; j < t; ++j) acc -= prev[j - 1] * acov[t - j];
    const double k = acc / v;
    if (!(std::fabs(k) < 1.0)) return -kInf;
    for (int j = 1; j < t; ++j) phi[j - 1] = prev[j - 1] - k * prev[t - 1 - j];
    phi[t - 1] = k;
    v *= (1.0 - k * k);
    if (!(v > 0.0)) return -kInf;
    double pred = 0.0;
    for (int j = 1; j <= t; ++j) pred += phi[j - 1] * y[t - j];
    const double e = y[t] - pred;
    ll -= 0.5 * (std::log(v) + e * e / v);
    std::swap(phi, prev);
  }
  return ll;
}

// Deterministic multistart table in the unconstrained encoding: partial
// coefficients 0 (the white-noise-equivalent point) and four fixed
// perturbation patterns, all sharing the variance-matched scale.
std::vector<Eigen::VectorXd> start_points(int coef_dim, double log_sigma0,
                                          int count) {
  const double u3 = std::atanh(0.3), u5 = std::atanh(0.5);
  std::vector<Eigen::VectorXd> starts;
  for (int s = 0; s < std::max(1, std::min(count, 5)); ++s) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(coef_dim + 1);
    for (int j = 0; j < coef_dim; ++j) {
      switch (s) {
        case 1: u[j] = u3; break;
        case 2: u[j] = -u3; break;
        case 3: u[j] = (j % 2 == 0) ? u5 : -u5; break;
        case 4: u[j] = (j % 2 == 0) ? -u5 : u5; break;
        default: break;
      }
    }
    u[coef_dim] = log_sigma0;
    if (coef_dim == 0 && s > 0) break;  // all patterns coincide
    starts.push_back(std::move(u));
  }
  return starts;
}

// The optimizer works on the per-observation (mean) objective: that keeps
// the gradient and objective-change tolerances meaningful at every sample
// size. `scale` (= n) converts the optimum back to the full log-likelihood.
FitResult run_fit(const ParametricSpectralFamily& family,
                  const std::function<double(const Eigen::VectorXd&)>& neg,
                  std::vector<Eigen::VectorXd> starts, double scale,
                  const FitOptions& opts) {
  detail::OptimizeOptions oopt;
  oopt.max_iterations = opts.max_iterations;
  oopt.gradient_tol = opts.gradient_tol;
  oopt.objective_tol = opts.objective_tol;
  if (opts.warm_start.has_value())
    starts.push_back(family.to_unconstrained(*opts.warm_start));
  detail::OptimizeResult r = detail::multistart_minimize(neg, starts, oopt);
  if (!std::isfinite(r.value))
    throw NumericDegeneracyError(family.label() +
                                 ": objective degenerate at every start");
  FitResult fit{family,
                ParamVector::natural(family.from_unconstrained(r.x)),
                -r.value * scale,
                std::nullopt,
                Eigen::MatrixXd(),
                Eigen::MatrixXd(),
                r.converged,
                r.iterations,
                r.gradient_norm};
  return fit;
}

}  // namespace

double whittle_loglik(const TimeSeries& y,
                      const ParametricSpectralFamily& family,
                      const ParamVector& theta, const QuadratureRule& q) {
  const Eigen::VectorXd nat = family.natural(theta);
  if (!family.in_constraint_region(nat))
    throw PreconditionError(family.label() + ": theta outside constraint region");
  EmpiricalSpectrum spec(y, q);
  std::vector<double> f(q.size());
  family.density_grid(nat, q.nodes(), f);
  const double value = whittle_value(f, spec.grid_values(), q, y.n());
  if (!std::isfinite(value))
    throw NumericDegeneracyError(family.label() +
                                 ": spectral density below floor at a node");
  return value;
}

FitResult fit_whittle(const TimeSeries& y,
                      const ParametricSpectralFamily& family,
                      const QuadratureRule& q, const FitOptions& opts) {
  return fit_whittle(EmpiricalSpectrum(y, q), family, q, opts);
}

FitResult fit_whittle(const EmpiricalSpectrum& spec,
                      const ParametricSpectralFamily& family,
                      const QuadratureRule& q, const FitOptions& opts) {
  const TimeSeries& y = spec.series();
  check_series(y, family.param_dim());
  std::vector<double> peri_storage;
  if (!spec.rule().same_as(q)) {
    peri_storage.resize(q.size());
    for (int i = 0; i < q.size(); ++i)
      peri_storage[i] = spec.evaluate(q.nodes()[i]);
  }
  const std::vector<double>& peri =
      peri_storage.empty() ? spec.grid_values() : peri_storage;
  double mass = 0.0;  // int_{-pi}^{pi} I_n ~ mean square
  for (int i = 0; i < q.size(); ++i) mass += q.weights()[i] * peri[i];
  mass *= 2.0;

  const int coef_dim = family.param_dim() - 1;
  std::vector<double> f(q.size());
  const int n = y.n();
  auto neg = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd nat = family.from_unconstrained(u);
    family.density_grid(nat, q.nodes(), f);
    return -whittle_value(f, peri, q, n) / n;
  };
  FitResult fit = run_fit(family, neg,
                          start_points(coef_dim, 0.5 * std::log(mass),
                                       opts.multistarts),
                          n, opts);
  const SpectralReference ref = SpectralReference::empirical(spec, q);
  fit.J_hat = sandwich_J(ref, family, fit.theta_hat, q);
  fit.K_hat = sandwich_K(ref, family, fit.theta_hat, q);
  if (opts.compute_gaussian_loglik)
    fit.gaussian_loglik = gaussian_loglik(y, family, fit.theta_hat, q);
  return fit;
}

double gaussian_loglik(const TimeSeries& y,
                       const ParametricSpectralFamily& family,
                       const ParamVector& theta, const QuadratureRule& q) {
  const Eigen::VectorXd nat = family.natural(theta);
  std::vector<double> f(q.size());
  family.density_grid(nat, q.nodes(), f);
  const std::vector<double> acov =
      autocovariances_from_grid(f, y.n() - 1, q);
  const double ll = dl_gaussian_loglik(y.values, acov);
  if (!std::isfinite(ll))
    throw NumericDegeneracyError(family.label() +
                                 ": model covariance numerically singular");
  return ll;
}

FitResult fit_gaussian_ml(const TimeSeries& y,
                          const ParametricSpectralFamily& family,
                          const FitOptions& opts) {
  if (y.n() > 5000)
    throw PreconditionError("fit_gaussian_ml: n <= 5000 (dense evaluation)");
  check_series(y, family.param_dim());
  const QuadratureRule q = default_quadrature(y.n());
  const int n = y.n();
  double msq = 0.0;
  for (double v : y.values) msq += v * v;
  msq /= n;

  std::vector<double> f(q.size());
  auto neg = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd nat = family.from_unconstrained(u);
    family.density_grid(nat, q.nodes(), f);
    const std::vector<double> acov = autocovariances_from_grid(f, n - 1, q);
    return -dl_gaussian_loglik(y.values, acov) / n;
  };
  FitResult fit = run_fit(family, neg,
                          start_points(family.param_dim() - 1,
                                       0.5 * std::log(msq), opts.multistarts),
                          n, opts);
  // run_fit stored the maximized exact likelihood in the whittle slot;
  // move it and recompute the Whittle value at the estimate.
  fit.gaussian_loglik = fit.whittle_loglik;
  EmpiricalSpectrum spec(y, q);
  family.density_grid(family.natural(fit.theta_hat), q.nodes(), f);
  fit.whittle_loglik = whittle_value(f, spec.grid_values(), q, n);
  const SpectralReference ref = SpectralReference::empirical(spec, q);
  fit.J_hat = sandwich_J(ref, family, fit.theta_hat, q);
  fit.K_hat = sandwich_K(ref, family, fit.theta_hat, q);
  return fit;
}

Eigen::MatrixXd sandwich_J(const SpectralReference& gref,
                           const ParametricSpectralFamily& family,
                           const ParamVector& theta, const QuadratureRule& q) {
  const Eigen::VectorXd nat = family.natural(theta);
  const int p = family.param_dim();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(p, p);
  std::vector<double> f(q.size());
  family.density_grid(nat, q.nodes(), f);
  for (int i = 0; i < q.size(); ++i) {
    const double w = q.nodes()[i];
    const Eigen::VectorXd gl = family.grad_log(nat, w);
    const Eigen::MatrixXd hl = family.hess_log(nat, w);
    const double g = gref.g()[i];
    J += q.weights()[i] *
         ((gl * gl.transpose()) * g + hl * (f[i] - g)) / f[i];
  }
  J /= (2.0 * kPi);
  return 0.5 * (J + J.transpose());
}

Eigen::MatrixXd sandwich_K(const SpectralReference& gref,
                           const ParametricSpectralFamily& family,
                           const ParamVector& theta, const QuadratureRule& q) {
  const Eigen::VectorXd nat = family.natural(theta);
  const int p = family.param_dim();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(p, p);
  std::vector<double> f(q.size());
  family.density_grid(nat, q.nodes(), f);
  for (int i = 0; i < q.size(); ++i) {
    const Eigen::VectorXd gl = family.grad_log(nat, q.nodes()[i]);
    K += q.weights()[i] * (gref.g_squared()[i] / (f[i] * f[i])) *
         (gl * gl.transpose());
  }
  K /= (2.0 * kPi);
  return 0.5 * (K + K.transpose());
}

double discrepancy_from_grid(std::span<const double> g_values,
                             const ParametricSpectralFamily& family,
                             const ParamVector& theta,
                             const QuadratureRule& q) {
  const Eigen::VectorXd nat = family.natural(theta);
  std::vector<double> f(q.size());
  family.density_grid(nat, q.nodes(), f);
  double acc = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    const double ratio = g_values[i] / f[i];
    if (!(ratio > 0.0) || !std::isfinite(ratio)) return kInf;
    acc += q.weights()[i] * (ratio - 1.0 - std::log(ratio));
  }
  return acc / (2.0 * kPi);
}

double discrepancy(const SpectralDensity& g,
                   const ParametricSpectralFamily& family,
                   const ParamVector& theta, const QuadratureRule& q) {
  std::vector<double> gv(q.size());
  for (int i = 0; i < q.size(); ++i) gv[i] = g(q.nodes()[i]);
  const double d = discrepancy_from_grid(gv, family, theta, q);
  if (!std::isfinite(d))
    throw NumericDegeneracyError(
        "discrepancy: density ratio degenerate at a node");
  return d;
}

std::pair<double, double> aic_bic(const FitResult& fit, int n) {
  if (!fit.gaussian_loglik.has_value())
    throw PreconditionError("aic_bic: gaussian log-likelihood not computed");
  const double ll = *fit.gaussian_loglik;
  const int p = fit.family.param_dim();
  return {2.0 * p - 2.0 * ll, p * std::log(static_cast<double>(n)) - 2.0 * ll};
}

FitResult population_fit(const ParametricSpectralFamily& family,
                         const ParamVector& theta, const SpectralDensity& g,
                         const QuadratureRule& q) {
  const Eigen::VectorXd nat = family.natural(theta);
  if (!family.in_constraint_region(nat))
    throw PreconditionError(family.label() + ": theta outside constraint region");
  const SpectralReference ref = SpectralReference::analytic(g, q);
  FitResult fit{family,
                ParamVector::natural(nat),
                kNaN,
                std::nullopt,
                sandwich_J(ref, family, ParamVector::natural(nat), q),
                sandwich_K(ref, family, ParamVector::natural(nat), q),
                true,
                0,
                0.0};
  return fit;
}

}  // namespace specfic
