#include "specfic/spectral.hpp"

#include <cmath>
#include <numbers>

namespace specfic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelOrder = 24;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
  x.assign(order, 0.0);
  w.assign(order, 0.0);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = order * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z -= p1 / pp;
      if (std::fabs(z - z1) <= 1e-15) break;
    }
    x[i] = -z;
    x[order - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[order - 1 - i] = w[i];
  }
}

}  // namespace

QuadratureRule QuadratureRule::composite_gauss_legendre(int node_count) {
  if (node_count < 1)
    throw PreconditionError("quadrature: node count must be positive");
  QuadratureRule rule;
  // Equal-width panels of order kPanelOrder; any remainder raises the order
  // of the last panel so the total matches node_count exactly.
  int panels = std::max(1, node_count / kPanelOrder);
  const int remainder = node_count - panels * kPanelOrder;
  const double width = kPi / panels;
  rule.nodes_.reserve(node_count);
  rule.weights_.reserve(node_count);
  std::vector<double> x, w;
  for (int p = 0; p < panels; ++p) {
    const int order = (p == panels - 1) ? kPanelOrder + remainder
                                        : kPanelOrder;
    gauss_legendre(order, x, w);
    const double lo = p * width;
    for (int i = 0; i < order; ++i) {
      rule.nodes_.push_back(lo + 0.5 * width * (x[i] + 1.0));
      rule.weights_.push_back(0.5 * width * w[i]);
    }
  }
  rule.scheme_ = "composite-gauss-legendre";
  return rule;
}

bool QuadratureRule::same_as(const QuadratureRule& other) const {
  if (this == &other) return true;
  return size() == other.size() && !nodes_.empty() &&
         nodes_.front() == other.nodes_.front() &&
         nodes_.back() == other.nodes_.back();
}

QuadratureRule default_quadrature(int n) {
  if (n < 1) throw PreconditionError("default_quadrature: n must be >= 1");
  return QuadratureRule::composite_gauss_legendre(std::max(512, 4 * n));
}

// ---------------------------------------------------------------------------
// ARMA spectral family
// ---------------------------------------------------------------------------

namespace {

// Partial-autocorrelation transform for the "minus convention" polynomial
// 1 - c_1 z - ... - c_p z^p. Every r in (-1,1)^p maps to a stable
// coefficient vector and back.
Eigen::VectorXd pacf_to_coef(const Eigen::VectorXd& r) {
  const int p = static_cast<int>(r.size());
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd work(p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < j; ++i) work[i] = coef[i] - r[j] * coef[j - 1 - i];
    for (int i = 0; i < j; ++i) coef[i] = work[i];
    coef[j] = r[j];
  }
  return coef;
}

// Inverse of pacf_to_coef; returns false when the coefficients lie outside
// the stability region.
bool coef_to_pacf(const Eigen::VectorXd& coef, Eigen::VectorXd& r) {
  const int p = static_cast<int>(coef.size());
  r.resize(p);
  Eigen::VectorXd cur = coef, work(p);
  for (int j = p - 1; j >= 0; --j) {
    const double rj = cur[j];
    if (!(std::fabs(rj) < 1.0)) return false;
    r[j] = rj;
    const double denom = 1.0 - rj * rj;
    for (int i = 0; i < j; ++i)
      work[i] = (cur[i] + rj * cur[j - 1 - i]) / denom;
    for (int i = 0; i < j; ++i) cur[i] = work[i];
  }
  return true;
}

struct PolyValue {
  double re = 1.0;
  double im = 0.0;
  double sq = 1.0;  // |value|^2
};

// A(e^{iw}) = 1 - sum c_j e^{ijw} for sign = -1; 1 + sum c_j e^{ijw} for +1.
PolyValue eval_poly(const double* coef, int order, double omega, double sign) {
  PolyValue v;
  for (int j = 1; j <= order; ++j) {
    v.re += sign * coef[j - 1] * std::cos(j * omega);
    v.im += sign * coef[j - 1] * std::sin(j * omega);
  }
  v.sq = v.re * v.re + v.im * v.im;
  return v;
}

}  // namespace

ParametricSpectralFamily::ParametricSpectralFamily(int ar_order, int ma_order)
    : ar_(ar_order), ma_(ma_order) {
  if (ar_order < 0 || ma_order < 0)
    throw PreconditionError("arma family: orders must be nonnegative");
  if (ar_order > 0 && ma_order > 0) {
    label_ = "ARMA(" + std::to_string(ar_order) + "," +
             std::to_string(ma_order) + ")";
  } else if (ma_order > 0) {
    label_ = "MA(" + std::to_string(ma_order) + ")";
  } else {
    label_ = "AR(" + std::to_string(ar_order) + ")";
  }
}

ParametricSpectralFamily make_arma_family(int ar_order, int ma_order) {
  return ParametricSpectralFamily(ar_order, ma_order);
}

double ParametricSpectralFamily::density(const Eigen::VectorXd& theta,
                                         double omega) const {
  const double sigma = theta[param_dim() - 1];
  const PolyValue a = eval_poly(theta.data(), ar_, omega, -1.0);
  const PolyValue b = eval_poly(theta.data() + ar_, ma_, omega, +1.0);
  return sigma * sigma / (2.0 * kPi) * b.sq / a.sq;
}

Eigen::VectorXd ParametricSpectralFamily::grad_log(
    const Eigen::VectorXd& theta, double omega) const {
  const int p = param_dim();
  const double sigma = theta[p - 1];
  const PolyValue a = eval_poly(theta.data(), ar_, omega, -1.0);
  const PolyValue b = eval_poly(theta.data() + ar_, ma_, omega, +1.0);
  Eigen::VectorXd g(p);
  for (int j = 1; j <= ar_; ++j)
    g[j - 1] =
        2.0 * (a.re * std::cos(j * omega) + a.im * std::sin(j * omega)) / a.sq;
  for (int j = 1; j <= ma_; ++j)
    g[ar_ + j - 1] =
        2.0 * (b.re * std::cos(j * omega) + b.im * std::sin(j * omega)) / b.sq;
  g[p - 1] = 2.0 / sigma;
  return g;
}

Eigen::VectorXd ParametricSpectralFamily::grad_density(
    const Eigen::VectorXd& theta, double omega) const {
  return density(theta, omega) * grad_log(theta, omega);
}

Eigen::MatrixXd ParametricSpectralFamily::hess_log(
    const Eigen::VectorXd& theta, double omega) const {
  const int p = param_dim();
  const double sigma = theta[p - 1];
  const PolyValue a = eval_poly(theta.data(), ar_, omega, -1.0);
  const PolyValue b = eval_poly(theta.data() + ar_, ma_, omega, +1.0);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
  // AR block: Psi contains -log|A|^2. With da_k = d|A|^2/d rho_k,
  // d2|A|^2/d rho_k d rho_l = 2 cos((k-l) w).
  for (int k = 1; k <= ar_; ++k) {
    const double dak =
        -2.0 * (a.re * std::cos(k * omega) + a.im * std::sin(k * omega));
    for (int l = k; l <= ar_; ++l) {
      const double dal =
          -2.0 * (a.re * std::cos(l * omega) + a.im * std::sin(l * omega));
      const double d2 = 2.0 * std::cos((k - l) * omega);
      const double v = -(d2 * a.sq - dak * dal) / (a.sq * a.sq);
      h(k - 1, l - 1) = v;
      h(l - 1, k - 1) = v;
    }
  }
  // MA block: Psi contains +log|B|^2.
  for (int k = 1; k <= ma_; ++k) {
    const double dbk =
        2.0 * (b.re * std::cos(k * omega) + b.im * std::sin(k * omega));
    for (int l = k; l <= ma_; ++l) {
      const double dbl =
          2.0 * (b.re * std::cos(l * omega) + b.im * std::sin(l * omega));
      const double d2 = 2.0 * std::cos((k - l) * omega);
      const double v = (d2 * b.sq - dbk * dbl) / (b.sq * b.sq);
      h(ar_ + k - 1, ar_ + l - 1) = v;
      h(ar_ + l - 1, ar_ + k - 1) = v;
    }
  }
  h(p - 1, p - 1) = -2.0 / (sigma * sigma);
  return h;
}

Eigen::VectorXd ParametricSpectralFamily::to_unconstrained(
    const Eigen::VectorXd& theta) const {
  const int p = param_dim();
  Eigen::VectorXd u(p);
  Eigen::VectorXd r;
  if (ar_ > 0) {
    if (!coef_to_pacf(theta.head(ar_), r))
      throw PreconditionError(label_ + ": AR block outside stationarity region");
    for (int j = 0; j < ar_; ++j) u[j] = std::atanh(r[j]);
  }
  if (ma_ > 0) {
    if (!coef_to_pacf(-theta.segment(ar_, ma_), r))
      throw PreconditionError(label_ + ": MA block outside invertibility region");
    for (int j = 0; j < ma_; ++j) u[ar_ + j] = std::atanh(r[j]);
  }
  const double sigma = theta[p - 1];
  if (!(sigma > 0.0))
    throw PreconditionError(label_ + ": sigma must be positive");
  u[p - 1] = std::log(sigma);
  return u;
}

Eigen::VectorXd ParametricSpectralFamily::from_unconstrained(
    const Eigen::VectorXd& u) const {
  const int p = param_dim();
  Eigen::VectorXd theta(p);
  if (ar_ > 0) {
    Eigen::VectorXd r(ar_);
    for (int j = 0; j < ar_; ++j) r[j] = std::tanh(u[j]);
    theta.head(ar_) = pacf_to_coef(r);
  }
  if (ma_ > 0) {
    Eigen::VectorXd r(ma_);
    for (int j = 0; j < ma_; ++j) r[j] = std::tanh(u[ar_ + j]);
    theta.segment(ar_, ma_) = -pacf_to_coef(r);
  }
  theta[p - 1] = std::exp(u[p - 1]);
  return theta;
}

bool ParametricSpectralFamily::in_constraint_region(
    const Eigen::VectorXd& theta) const {
  Eigen::VectorXd r;
  if (ar_ > 0 && !coef_to_pacf(theta.head(ar_), r)) return false;
  if (ma_ > 0 && !coef_to_pacf(-theta.segment(ar_, ma_), r)) return false;
  return theta[param_dim() - 1] > 0.0;
}

Eigen::VectorXd ParametricSpectralFamily::natural(
    const ParamVector& theta) const {
  if (static_cast<int>(theta.values.size()) != param_dim())
    throw PreconditionError(label_ + ": parameter dimension mismatch");
  return theta.encoding == ParamEncoding::kNatural
             ? theta.values
             : from_unconstrained(theta.values);
}

void ParametricSpectralFamily::density_grid(const Eigen::VectorXd& theta,
                                            std::span<const double> omegas,
                                            std::span<double> out) const {
  const double s2 = theta[param_dim() - 1] * theta[param_dim() - 1] /
                    (2.0 * kPi);
  const int maxord = std::max(ar_, ma_);
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double w = omegas[i];
    double are = 1.0, aim = 0.0, bre = 1.0, bim = 0.0;
    // cos(jw), sin(jw) by angle addition from the order-1 values.
    const double c1 = std::cos(w), s1 = std::sin(w);
    double cj = 1.0, sj = 0.0;
    for (int j = 1; j <= maxord; ++j) {
      const double c = cj * c1 - sj * s1;
      const double s = sj * c1 + cj * s1;
      cj = c;
      sj = s;
      if (j <= ar_) {
        are -= theta[j - 1] * c;
        aim -= theta[j - 1] * s;
      }
      if (j <= ma_) {
        bre += theta[ar_ + j - 1] * c;
        bim += theta[ar_ + j - 1] * s;
      }
    }
    out[i] = s2 * (bre * bre + bim * bim) / (are * are + aim * aim);
  }
}

SpectralDensity ParametricSpectralFamily::spectral_density(
    Eigen::VectorXd theta) const {
  ParametricSpectralFamily family = *this;
  return SpectralDensity(
      [family, theta = std::move(theta)](double omega) {
        return family.density(theta, omega);
      });
}

// ---------------------------------------------------------------------------
// Spectral integrals
// ---------------------------------------------------------------------------

double autocovariance(const SpectralDensity& f, int lag,
                      const QuadratureRule& q) {
  if (lag < 0) throw PreconditionError("autocovariance: lag must be >= 0");
  return 2.0 * q.integrate([&](double w) { return std::cos(lag * w) * f(w); });
}

std::vector<double> autocovariances_from_grid(std::span<const double> values,
                                              int max_lag,
                                              const QuadratureRule& q) {
  const int m = q.size();
  std::vector<double> out(max_lag + 1, 0.0);
  // Chebyshev recurrence in the lag index, one rolling state per node.
  std::vector<double> ck(m, 1.0), ckm1(m, 0.0), c1(m), wf(m);
  for (int i = 0; i < m; ++i) {
    c1[i] = std::cos(q.nodes()[i]);
    wf[i] = q.weights()[i] * values[i];
    out[0] += wf[i];
  }
  for (int k = 1; k <= max_lag; ++k) {
    double acc = 0.0;
    if (k == 1) {
      for (int i = 0; i < m; ++i) {
        ckm1[i] = ck[i];
        ck[i] = c1[i];
        acc += wf[i] * ck[i];
      }
    } else {
      for (int i = 0; i < m; ++i) {
        const double c = 2.0 * c1[i] * ck[i] - ckm1[i];
        ckm1[i] = ck[i];
        ck[i] = c;
        acc += wf[i] * c;
      }
    }
    out[k] = acc;
  }
  for (double& v : out) v *= 2.0;
  return out;
}

std::vector<double> autocovariances(const SpectralDensity& f, int max_lag,
                                    const QuadratureRule& q) {
  std::vector<double> values(q.size());
  for (int i = 0; i < q.size(); ++i) values[i] = f(q.nodes()[i]);
  return autocovariances_from_grid(values, max_lag, q);
}

Eigen::MatrixXd toeplitz_weight_matrix(const FocusWeight& h0, int n,
                                       const QuadratureRule& q) {
  if (n < 1) throw PreconditionError("toeplitz_weight_matrix: n must be >= 1");
  std::vector<double> values(q.size());
  for (int i = 0; i < q.size(); ++i) values[i] = h0.even(q.nodes()[i]);
  // (1/2pi) int_{-pi}^{pi} cos(w d) h0(w) dw = (1/pi) int_0^pi cos(w d) h0_even.
  std::vector<double> band = autocovariances_from_grid(values, n - 1, q);
  Eigen::MatrixXd m(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) m(s, t) = band[std::abs(s - t)] / (2.0 * kPi);
  return m;
}

}  // namespace specfic
