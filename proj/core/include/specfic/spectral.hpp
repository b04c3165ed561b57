#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specfic/errors.hpp"
#include "specfic/focus.hpp"

namespace specfic {

/// Composite Gauss-Legendre rule on (0, pi]. All spectral integrals in the
/// toolkit share one such rule per series length, so internal identities
/// (Parseval, quadratic forms) hold to quadrature accuracy.
class QuadratureRule {
 public:
  /// Builds a composite rule with exactly node_count nodes.
  static QuadratureRule composite_gauss_legendre(int node_count);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::string& scheme() const { return scheme_; }

  /// Integral of f over (0, pi].
  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) acc += weights_[i] * f(nodes_[i]);
    return acc;
  }

  /// True when both rules were built with identical nodes.
  bool same_as(const QuadratureRule& other) const;

 private:
  QuadratureRule() = default;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::string scheme_;
};

/// Shared rule for a series of length n: max(512, 4n) nodes.
QuadratureRule default_quadrature(int n);

/// A symmetric, nonnegative spectral density on [-pi, pi].
class SpectralDensity {
 public:
  explicit SpectralDensity(std::function<double(double)> evaluate)
      : evaluate_(std::move(evaluate)) {}

  double operator()(double omega) const { return evaluate_(omega); }

 private:
  std::function<double(double)> evaluate_;
};

enum class ParamEncoding { kNatural, kUnconstrained };

/// Model parameters with an explicit encoding tag. The natural encoding
/// lives in the family's constraint region; the unconstrained one is the
/// image of the partial-autocorrelation / log-scale reparameterization.
struct ParamVector {
  Eigen::VectorXd values;
  ParamEncoding encoding = ParamEncoding::kNatural;

  static ParamVector natural(Eigen::VectorXd v) {
    return {std::move(v), ParamEncoding::kNatural};
  }
  static ParamVector unconstrained(Eigen::VectorXd v) {
    return {std::move(v), ParamEncoding::kUnconstrained};
  }
};

/// An ARMA(p, q) spectral family with analytic derivatives of the
/// log-density and an invertible unconstrained reparameterization.
///
/// theta = (rho_1..rho_p, phi_1..phi_q, sigma), natural encoding, with
///   f(w) = sigma^2/(2 pi) |1 + phi_1 e^{iw} + ...|^2 / |1 - rho_1 e^{iw} - ...|^2.
/// The unconstrained encoding maps each coefficient block through the
/// Durbin-Levinson partial-autocorrelation transform (atanh on each partial
/// coefficient) and sigma through log. Stationarity of the AR block and
/// invertibility of the MA block hold for every unconstrained vector.
class ParametricSpectralFamily {
 public:
  ParametricSpectralFamily(int ar_order, int ma_order);

  int ar_order() const { return ar_; }
  int ma_order() const { return ma_; }
  int param_dim() const { return ar_ + ma_ + 1; }
  const std::string& label() const { return label_; }

  double density(const Eigen::VectorXd& theta_natural, double omega) const;
  Eigen::VectorXd grad_density(const Eigen::VectorXd& theta_natural,
                               double omega) const;
  Eigen::VectorXd grad_log(const Eigen::VectorXd& theta_natural,
                           double omega) const;
  Eigen::MatrixXd hess_log(const Eigen::VectorXd& theta_natural,
                           double omega) const;

  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta_natural) const;
  Eigen::VectorXd from_unconstrained(const Eigen::VectorXd& u) const;
  bool in_constraint_region(const Eigen::VectorXd& theta_natural) const;

  /// Normalizes a tagged parameter vector to the natural encoding.
  Eigen::VectorXd natural(const ParamVector& theta) const;

  /// Density values at a frequency grid; one pass, no trig calls per node
  /// beyond first-order terms (Chebyshev recurrences in the grid loop).
  void density_grid(const Eigen::VectorXd& theta_natural,
                    std::span<const double> omegas,
                    std::span<double> out) const;

  SpectralDensity spectral_density(Eigen::VectorXd theta_natural) const;

 private:
  int ar_;
  int ma_;
  std::string label_;
};

ParametricSpectralFamily make_arma_family(int ar_order, int ma_order);

/// C(k) = 2 int_0^pi cos(k w) f(w) dw, evaluated with the given rule.
double autocovariance(const SpectralDensity& f, int lag,
                      const QuadratureRule& q);

/// C(0..max_lag) in one sweep over the rule's nodes.
std::vector<double> autocovariances(const SpectralDensity& f, int max_lag,
                                    const QuadratureRule& q);

/// Same sweep for density values already tabulated at the rule's nodes.
std::vector<double> autocovariances_from_grid(std::span<const double> values,
                                              int max_lag,
                                              const QuadratureRule& q);

/// Symmetric Toeplitz matrix with entries
///   (1/2pi) int_{-pi}^{pi} cos(w |s-t|) h0(w) dw,
/// normalized so that (1/n) y^t M y equals int h0 I_n dw exactly in the
/// population and to quadrature accuracy on a grid.
Eigen::MatrixXd toeplitz_weight_matrix(const FocusWeight& h0, int n,
                                       const QuadratureRule& q);

}  // namespace specfic
