#ifndef DPLOGIT_OPTIM_HPP
#define DPLOGIT_OPTIM_HPP

#include <Eigen/Dense>
#include <functional>

namespace dplogit {

// Quasi-Newton (BFGS) minimizer with central-difference gradients.
struct MinimizeOptions {
  double grad_tol = 1e-8;
  int max_iter = 500;
  double fd_step = 5e-6;  // relative central-difference step
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

MinimizeResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                             const MinimizeOptions& opts = {});

Eigen::VectorXd numerical_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double rel_step = 5e-6);

}  // namespace dplogit

#endif  // DPLOGIT_OPTIM_HPP
