#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "specfic/periodogram.hpp"
#include "specfic/spectral.hpp"

namespace specfic {

/// Optimizer settings shared by the Whittle and exact Gaussian fits.
/// Defaults are fixed so that fits are reproducible bit for bit.
struct FitOptions {
  int multistarts = 5;           // deterministic start points
  int max_iterations = 500;      // per start
  // Tolerances apply to the per-observation (mean) objective in the
  // unconstrained encoding; the mean scaling keeps them meaningful at
  // every sample size.
  double gradient_tol = 1e-6;    // sup-norm
  double objective_tol = 1e-10;  // stop when improvement falls below
  bool compute_gaussian_loglik = false;  // also evaluate the exact loglik
  std::optional<Eigen::VectorXd> warm_start;  // extra natural-encoded start
};

struct FitResult {
  ParametricSpectralFamily family;
  ParamVector theta_hat;  // natural encoding
  double whittle_loglik = 0.0;
  std::optional<double> gaussian_loglik;
  Eigen::MatrixXd J_hat;
  Eigen::MatrixXd K_hat;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

/// Whittle pseudo-log-likelihood
///   -(n/2) [ log 2pi + (1/2pi) int log{2pi f} dw + (1/2pi) int I_n/f dw ],
/// with both integrals over [-pi, pi] folded onto (0, pi].
double whittle_loglik(const TimeSeries& y,
                      const ParametricSpectralFamily& family,
                      const ParamVector& theta, const QuadratureRule& q);

/// Maximizes the Whittle objective over the unconstrained encoding
/// (quasi-Newton, deterministic multistarts). J_hat and K_hat are the
/// periodogram plug-ins J(I_n, f) and K(I_n/sqrt 2, f) at the estimate.
FitResult fit_whittle(const TimeSeries& y,
                      const ParametricSpectralFamily& family,
                      const QuadratureRule& q, const FitOptions& opts = {});

/// Same fit reusing an already-built periodogram cache.
FitResult fit_whittle(const EmpiricalSpectrum& spec,
                      const ParametricSpectralFamily& family,
                      const QuadratureRule& q, const FitOptions& opts = {});

/// Maximizes the exact zero-mean Gaussian log-likelihood, evaluated through
/// the Durbin-Levinson innovations decomposition of the model covariance.
FitResult fit_gaussian_ml(const TimeSeries& y,
                          const ParametricSpectralFamily& family,
                          const FitOptions& opts = {});

/// Exact Gaussian log-likelihood at a fixed parameter value.
double gaussian_loglik(const TimeSeries& y,
                       const ParametricSpectralFamily& family,
                       const ParamVector& theta, const QuadratureRule& q);

/// J(g, f_theta) = (1/4pi) int [grad Psi grad Psi^t g
///                              + hess Psi (f - g)] / f dw.
Eigen::MatrixXd sandwich_J(const SpectralReference& gref,
                           const ParametricSpectralFamily& family,
                           const ParamVector& theta, const QuadratureRule& q);

/// K(g, f_theta) = (1/4pi) int grad Psi grad Psi^t (g/f)^2 dw. With an
/// empirical reference, g^2 is replaced by the plug-in I_n^2/2.
Eigen::MatrixXd sandwich_K(const SpectralReference& gref,
                           const ParametricSpectralFamily& family,
                           const ParamVector& theta, const QuadratureRule& q);

/// Whittle divergence d(g, f_theta)
///   = (1/4pi) int [ g/f - 1 - log(g/f) ] dw  >= 0.
double discrepancy(const SpectralDensity& g,
                   const ParametricSpectralFamily& family,
                   const ParamVector& theta, const QuadratureRule& q);

/// Same divergence with g already tabulated at the rule's nodes; returns
/// +inf instead of throwing when the ratio degenerates (optimizer friendly).
double discrepancy_from_grid(std::span<const double> g_values,
                             const ParametricSpectralFamily& family,
                             const ParamVector& theta,
                             const QuadratureRule& q);

/// (aic, bic) from the exact Gaussian log-likelihood of a fit.
std::pair<double, double> aic_bic(const FitResult& fit, int n);

/// A FitResult pinned at a given parameter value with plug-in J and K
/// computed from an analytic reference density. Used for population-level
/// checks of the limit identities, with no data involved.
FitResult population_fit(const ParametricSpectralFamily& family,
                         const ParamVector& theta, const SpectralDensity& g,
                         const QuadratureRule& q);

}  // namespace specfic
