#include "specfic/periodogram.hpp"

#include <cmath>
#include <numbers>

namespace specfic {

namespace {

constexpr double kPi = std::numbers::pi;
// Rotation recurrences are re-anchored with exact trig every this many
// steps, keeping the accumulated phase error near machine precision.
constexpr int kRenormStride = 256;

// |sum_t y_t e^{i w t}|^2 via incremental rotation, t = 1..n.
double dft_modulus_squared(const std::vector<double>& y, double omega) {
  const int n = static_cast<int>(y.size());
  const double c1 = std::cos(omega), s1 = std::sin(omega);
  double accre = 0.0, accim = 0.0;
  double cr = 1.0, ci = 0.0;  // e^{i w t} for the previous t
  for (int t = 1; t <= n; ++t) {
    if ((t - 1) % kRenormStride == 0) {
      cr = std::cos(omega * t);
      ci = std::sin(omega * t);
    } else {
      const double nr = cr * c1 - ci * s1;
      ci = ci * c1 + cr * s1;
      cr = nr;
    }
    accre += y[t - 1] * cr;
    accim += y[t - 1] * ci;
  }
  return accre * accre + accim * accim;
}

}  // namespace

double periodogram_at(const TimeSeries& y, double omega) {
  if (y.n() == 0) throw PreconditionError("periodogram: empty series");
  // Even in omega by construction.
  const double w = std::fabs(omega);
  return dft_modulus_squared(y.values, w) / (2.0 * kPi * y.n());
}

EmpiricalSpectrum::EmpiricalSpectrum(TimeSeries series, QuadratureRule rule)
    : series_(std::move(series)), rule_(std::move(rule)) {
  if (series_.n() < 1) throw PreconditionError("periodogram: empty series");
  grid_.resize(rule_.size());
  for (int i = 0; i < rule_.size(); ++i)
    grid_[i] = periodogram_at(series_, rule_.nodes()[i]);
}

double EmpiricalSpectrum::evaluate(double omega) const {
  return periodogram_at(series_, omega);
}

namespace {

const std::vector<double>& grid_for(const EmpiricalSpectrum& spec,
                                    const QuadratureRule& q,
                                    std::vector<double>& scratch) {
  if (spec.rule().same_as(q)) return spec.grid_values();
  scratch.resize(q.size());
  for (int i = 0; i < q.size(); ++i)
    scratch[i] = spec.evaluate(q.nodes()[i]);
  return scratch;
}

}  // namespace

double integrate_distribution(const EmpiricalSpectrum& spec, double omega,
                              const QuadratureRule& q) {
  if (omega < -kPi - 1e-12 || omega > kPi + 1e-12)
    throw PreconditionError("integrate_distribution: omega outside [-pi, pi]");
  std::vector<double> scratch;
  const std::vector<double>& grid = grid_for(spec, q, scratch);
  double total = 0.0;
  double partial = 0.0;  // int_0^{|omega|} over nodes below the cut
  const double cut = std::fabs(omega);
  for (int i = 0; i < q.size(); ++i) {
    const double v = q.weights()[i] * grid[i];
    total += v;
    if (q.nodes()[i] <= cut) partial += v;
  }
  return omega >= 0.0 ? total + partial : total - partial;
}

double np_focus_linear(const EmpiricalSpectrum& spec, const FocusWeight& h0,
                       const QuadratureRule& q) {
  std::vector<double> scratch;
  const std::vector<double>& grid = grid_for(spec, q, scratch);
  double acc = 0.0;
  for (int i = 0; i < q.size(); ++i)
    acc += q.weights()[i] * h0.even(q.nodes()[i]) * grid[i];
  return 2.0 * acc;
}

double np_focus(const EmpiricalSpectrum& spec, const FocusFunctional& focus,
                const QuadratureRule& q) {
  Eigen::VectorXd components(focus.k());
  for (int j = 0; j < focus.k(); ++j)
    components[j] = np_focus_linear(spec, focus.weights()[j], q);
  return focus.transform(components);
}

SpectralReference SpectralReference::analytic(const SpectralDensity& g,
                                              const QuadratureRule& q) {
  SpectralReference ref;
  ref.empirical_ = false;
  ref.g_.resize(q.size());
  ref.g_squared_.resize(q.size());
  for (int i = 0; i < q.size(); ++i) {
    const double v = g(q.nodes()[i]);
    ref.g_[i] = v;
    ref.g_squared_[i] = v * v;
  }
  return ref;
}

SpectralReference SpectralReference::empirical(const EmpiricalSpectrum& spec,
                                               const QuadratureRule& q) {
  SpectralReference ref;
  ref.empirical_ = true;
  std::vector<double> scratch;
  const std::vector<double>& grid = grid_for(spec, q, scratch);
  ref.g_ = grid;
  ref.g_squared_.resize(q.size());
  for (int i = 0; i < q.size(); ++i)
    ref.g_squared_[i] = 0.5 * grid[i] * grid[i];  // I^2/2 estimates g^2
  return ref;
}

}  // namespace specfic
