#include "optimize.hpp"

#include <cmath>
#include <limits>

namespace specfic::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd numeric_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double f_x, double step) {
  const int d = static_cast<int>(x.size());
  Eigen::VectorXd g(d), xp = x, xm = x;
  for (int j = 0; j < d; ++j) {
    const double h = step * std::max(1.0, std::fabs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    const double fp = f(xp);
    const double fm = f(xm);
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[j] = (fp - fm) / (2.0 * h);
    } else if (std::isfinite(fp)) {
      g[j] = (fp - f_x) / h;
    } else if (std::isfinite(fm)) {
      g[j] = (f_x - fm) / h;
    } else {
      g[j] = 0.0;
    }
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return g;
}

}  // namespace

OptimizeResult bfgs_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const OptimizeOptions& opt) {
  const int d = static_cast<int>(x0.size());
  OptimizeResult res;
  res.x = x0;
  res.value = f(x0);
  if (!std::isfinite(res.value)) {
    res.gradient_norm = kInf;
    return res;
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);  // inverse Hessian
  Eigen::VectorXd g = numeric_gradient(f, res.x, res.value, opt.fd_step);

  // Objectives scale with the sample size, so the objective-change test can
  // trip while the gradient is still polishing; allow a few stalled
  // iterations before giving up on the gradient criterion.
  int stalled = 0;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    res.iterations = iter;
    res.gradient_norm = g.lpNorm<Eigen::Infinity>();
    if (res.gradient_norm < opt.gradient_tol) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd dir = -(H * g);
    double slope = dir.dot(g);
    if (!(slope < 0.0)) {  // not a descent direction: reset curvature
      H.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    // Backtracking Armijo line search.
    double alpha = 1.0;
    double f_new = kInf;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = res.x + alpha * dir;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= res.value + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return res;  // stuck; report last good point

    const double improvement = res.value - f_new;
    Eigen::VectorXd g_new = numeric_gradient(f, x_new, f_new, opt.fd_step);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const Eigen::VectorXd Hy = H * yv;
      const double yHy = yv.dot(Hy);
      // BFGS inverse update.
      H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
           (Hy * s.transpose() + s * Hy.transpose()) / sy;
    }
    res.x = x_new;
    res.value = f_new;
    g = std::move(g_new);
    if (improvement < opt.objective_tol) {
      if (++stalled >= 8) {
        res.gradient_norm = g.lpNorm<Eigen::Infinity>();
        res.converged = res.gradient_norm < opt.gradient_tol;
        res.iterations = iter + 1;
        return res;
      }
    } else {
      stalled = 0;
    }
  }
  res.gradient_norm = g.lpNorm<Eigen::Infinity>();
  res.converged = res.gradient_norm < opt.gradient_tol;
  res.iterations = opt.max_iterations;
  return res;
}

OptimizeResult multistart_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::vector<Eigen::VectorXd>& starts, const OptimizeOptions& opt) {
  OptimizeResult best;
  best.value = kInf;
  bool have = false;
  for (const Eigen::VectorXd& s : starts) {
    OptimizeResult r = bfgs_minimize(f, s, opt);
    if (!have || r.value < best.value) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace specfic::detail
