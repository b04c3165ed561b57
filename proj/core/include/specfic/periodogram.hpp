#pragma once

#include <vector>

#include "specfic/focus.hpp"
#include "specfic/spectral.hpp"

namespace specfic {

/// An observed real-valued series y_1..y_n.
struct TimeSeries {
  std::vector<double> values;
  bool detrended = false;

  int n() const { return static_cast<int>(values.size()); }
};

/// The raw periodogram of a series, with values cached at the nodes of a
/// shared quadrature rule. Immutable after construction.
class EmpiricalSpectrum {
 public:
  EmpiricalSpectrum(TimeSeries series, QuadratureRule rule);

  /// I_n(w) at an arbitrary frequency (direct summation; uses |w| so the
  /// evenness I_n(w) = I_n(-w) holds exactly).
  double evaluate(double omega) const;

  const std::vector<double>& grid_values() const { return grid_; }
  const TimeSeries& series() const { return series_; }
  const QuadratureRule& rule() const { return rule_; }

 private:
  TimeSeries series_;
  QuadratureRule rule_;
  std::vector<double> grid_;
};

/// I_n(w) = (2 pi n)^{-1} |sum_t y_t exp(i w t)|^2.
double periodogram_at(const TimeSeries& y, double omega);

/// Spectral distribution estimate G_n(w) = int_{-pi}^w I_n(u) du, folded
/// onto (0, pi] by evenness and accumulated over the shared rule's nodes.
double integrate_distribution(const EmpiricalSpectrum& spec, double omega,
                              const QuadratureRule& q);

/// int_{-pi}^{pi} h0(w) I_n(w) dw. For h0 = cos(k w) this is the empirical
/// lag-k autocovariance (1/n) sum y_t y_{t+k} to quadrature accuracy.
double np_focus_linear(const EmpiricalSpectrum& spec, const FocusWeight& h0,
                       const QuadratureRule& q);

/// H applied to the vector of np_focus_linear values of a functional.
double np_focus(const EmpiricalSpectrum& spec, const FocusFunctional& focus,
                const QuadratureRule& q);

/// A reference spectrum for plug-in estimation: either an analytic density
/// g (with g^2 for quadratic functionals) or periodogram values I_n (with
/// I_n^2/2 as the unbiased plug-in for g^2). Holds values at rule nodes.
class SpectralReference {
 public:
  static SpectralReference analytic(const SpectralDensity& g,
                                    const QuadratureRule& q);
  static SpectralReference empirical(const EmpiricalSpectrum& spec,
                                     const QuadratureRule& q);

  const std::vector<double>& g() const { return g_; }
  const std::vector<double>& g_squared() const { return g_squared_; }
  bool is_empirical() const { return empirical_; }

 private:
  SpectralReference() = default;
  std::vector<double> g_;
  std::vector<double> g_squared_;
  bool empirical_ = false;
};

}  // namespace specfic
