#pragma once

#include <functional>

#include <Eigen/Dense>

namespace specfic::detail {

struct OptimizeOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-6;   // sup norm
  double objective_tol = 1e-10;  // absolute improvement
  double fd_step = 5e-6;        // central-difference scale
};

struct OptimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

/// BFGS minimization with central-difference gradients. The objective may
/// return +inf to flag an infeasible point; line searches back off.
OptimizeResult bfgs_minimize(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const OptimizeOptions& options = {});

/// Runs bfgs_minimize from every start and keeps the strictly best value.
OptimizeResult multistart_minimize(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const std::vector<Eigen::VectorXd>& starts,
    const OptimizeOptions& options = {});

}  // namespace specfic::detail
