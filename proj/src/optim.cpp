#include "dplogit/optim.hpp"

#include <cmath>

namespace dplogit {

Eigen::VectorXd numerical_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double rel_step) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x;
  for (int j = 0; j < n; ++j) {
    const double h = rel_step * (1.0 + std::abs(x(j)));
    xp(j) = x(j) + h;
    const double fp = f(xp);
    xp(j) = x(j) - h;
    const double fm = f(xp);
    xp(j) = x(j);
    g(j) = (fp - fm) / (2.0 * h);
  }
  return g;
}

MinimizeResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                             const MinimizeOptions& opts) {
  const int n = static_cast<int>(x0.size());
  MinimizeResult res;
  res.x = std::move(x0);
  res.f = f(res.x);

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = numerical_gradient(f, res.x, opts.fd_step);

  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    if (g.cwiseAbs().maxCoeff() < opts.grad_tol) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd dir = -(h_inv * g);
    if (dir.dot(g) >= 0.0) {  // not a descent direction: reset
      h_inv.setIdentity();
      dir = -g;
    }

    // backtracking Armijo line search
    double step = 1.0;
    const double slope = g.dot(dir);
    double f_new = res.f;
    Eigen::VectorXd x_new = res.x;
    bool improved = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = res.x + step * dir;
      f_new = f(x_new);
      if (f_new <= res.f + 1e-4 * step * slope) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      // line search stalled: accept stationarity if the gradient is already
      // small relative to finite-difference noise
      res.converged = g.cwiseAbs().maxCoeff() < 1e-4;
      return res;
    }

    Eigen::VectorXd g_new = numerical_gradient(f, x_new, opts.fd_step);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i_mat = Eigen::MatrixXd::Identity(n, n);
      h_inv = (i_mat - rho * s * yv.transpose()) * h_inv * (i_mat - rho * yv * s.transpose()) +
              rho * s * s.transpose();
    }
    res.x = x_new;
    res.f = f_new;
    g = g_new;
  }
  res.converged = g.cwiseAbs().maxCoeff() < opts.grad_tol;
  return res;
}

}  // namespace dplogit
