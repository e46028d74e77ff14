#include "dplogit/mle.hpp"

#include <cmath>
#include <vector>

#include "dplogit/common.hpp"

namespace dplogit {

namespace {

// One usable observation: outcome plus [x_t, y_{t-1}, ..., y_{t-p}].
struct Obs {
  double y;
  Eigen::VectorXd r;  // length K + p
};

std::vector<std::vector<Obs>> collect_observations(const PanelDataset& data) {
  const ModelSpec& spec = data.spec;
  std::vector<std::vector<Obs>> all;
  all.reserve(data.individuals.size());
  for (const Individual& ind : data.individuals) {
    std::vector<Obs> rows;
    for (int j = spec.p; j < spec.t_obs(); ++j) {
      if (!ind.outcome_observed(j) || !ind.regressors_observed(j)) continue;
      bool lags_ok = true;
      for (int l = 1; l <= spec.p; ++l) lags_ok = lags_ok && ind.outcome_observed(j - l);
      if (!lags_ok) continue;
      Obs o;
      o.y = ind.y(j);
      o.r.resize(spec.K + spec.p);
      if (spec.K > 0) o.r.head(spec.K) = ind.x.row(j).transpose();
      for (int l = 1; l <= spec.p; ++l) o.r(spec.K + l - 1) = ind.y(j - l);
      rows.push_back(std::move(o));
    }
    all.push_back(std::move(rows));
  }
  return all;
}

}  // namespace

PooledLogitResult pooled_logit_mle(const PanelDataset& data) {
  const ModelSpec& spec = data.spec;
  const int dim = spec.K + spec.p + 1;  // regressors, lags, constant
  const auto obs = collect_observations(data);

  long nobs = 0;
  for (const auto& rows : obs) nobs += static_cast<long>(rows.size());
  if (nobs < dim) throw std::runtime_error("pooled_logit_mle: not enough usable observations");

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  const auto loglik = [&](const Eigen::VectorXd& th) {
    double ll = 0.0;
    for (const auto& rows : obs)
      for (const Obs& o : rows) {
        const double idx = o.r.dot(th.head(dim - 1)) + th(dim - 1);
        ll += o.y * idx - std::log1p(std::exp(-std::abs(idx))) - std::max(idx, 0.0);
      }
    return ll;
  };

  PooledLogitResult res;
  double ll = loglik(theta);
  for (res.iterations = 0; res.iterations < 100; ++res.iterations) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rext(dim);
    for (const auto& rows : obs)
      for (const Obs& o : rows) {
        rext.head(dim - 1) = o.r;
        rext(dim - 1) = 1.0;
        const double idx = rext.dot(theta);
        const double mu = logistic(idx);
        g += (o.y - mu) * rext;
        h.selfadjointView<Eigen::Lower>().rankUpdate(rext, mu * (1.0 - mu));
      }
    if (g.cwiseAbs().maxCoeff() < 1e-8) {
      res.converged = true;
      break;
    }
    h = h.selfadjointView<Eigen::Lower>();
    Eigen::LDLT<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success || !solver.isPositive())
      throw std::runtime_error("pooled_logit_mle: singular information matrix");
    Eigen::VectorXd delta = solver.solve(g);
    double step = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd trial = theta + step * delta;
      const double ll_new = loglik(trial);
      if (ll_new >= ll - 1e-12) {
        theta = trial;
        ll = ll_new;
        break;
      }
      step *= 0.5;
      if (ls == 39) throw std::runtime_error("pooled_logit_mle: line search failed");
    }
    if (theta.cwiseAbs().maxCoeff() > 50.0)
      throw std::runtime_error("pooled_logit_mle: separation detected (diverging coefficients)");
  }
  res.params.beta = theta.head(spec.K);
  res.params.gamma = theta.segment(spec.K, spec.p);
  res.intercept = theta(dim - 1);
  return res;
}

FeLogitResult fe_logit_mle(const PanelDataset& data) {
  const ModelSpec& spec = data.spec;
  const int dim = spec.K + spec.p;
  const auto all_obs = collect_observations(data);

  // keep individuals with outcome variation; constant outcome paths have a
  // divergent intercept and contribute nothing
  std::vector<const std::vector<Obs>*> obs;
  for (const auto& rows : all_obs) {
    if (rows.size() < 2) continue;
    bool any0 = false, any1 = false;
    for (const Obs& o : rows) (o.y > 0.5 ? any1 : any0) = true;
    if (any0 && any1) obs.push_back(&rows);
  }
  if (obs.empty()) throw std::runtime_error("fe_logit_mle: no informative individuals");

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  std::vector<double> alpha(obs.size(), 0.0);

  // inner problem: intercept root of sum_t (y - logistic(r'theta + a)) = 0
  const auto solve_alpha = [&](const std::vector<Obs>& rows, const Eigen::VectorXd& th, double a0) {
    double a = a0, lo = -40.0, hi = 40.0;
    for (int it = 0; it < 80; ++it) {
      double g = 0.0, h = 0.0;
      for (const Obs& o : rows) {
        const double mu = logistic(o.r.dot(th) + a);
        g += o.y - mu;
        h += mu * (1.0 - mu);
      }
      if (std::abs(g) < 1e-12) return a;
      if (g > 0.0) lo = a; else hi = a;
      double a_new = a + g / std::max(h, 1e-12);
      if (a_new <= lo || a_new >= hi) a_new = 0.5 * (lo + hi);
      if (std::abs(a_new - a) < 1e-14) return a_new;
      a = a_new;
    }
    return a;
  };

  const auto profile_loglik = [&](const Eigen::VectorXd& th) {
    double ll = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double a = solve_alpha(*obs[i], th, alpha[i]);
      for (const Obs& o : *obs[i]) {
        const double idx = o.r.dot(th) + a;
        ll += o.y * idx - std::log1p(std::exp(-std::abs(idx))) - std::max(idx, 0.0);
      }
    }
    return ll;
  };

  FeLogitResult res;
  res.individuals_used = static_cast<long>(obs.size());
  double ll = profile_loglik(theta);
  for (res.iterations = 0; res.iterations < 200; ++res.iterations) {
    // refresh intercepts at the current theta
    for (std::size_t i = 0; i < obs.size(); ++i) alpha[i] = solve_alpha(*obs[i], theta, alpha[i]);

    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd a_mat = Eigen::MatrixXd::Zero(dim, dim);  // negative profile Hessian
    for (std::size_t i = 0; i < obs.size(); ++i) {
      Eigen::VectorXd rd = Eigen::VectorXd::Zero(dim);
      double dsum = 0.0;
      for (const Obs& o : *obs[i]) {
        const double mu = logistic(o.r.dot(theta) + alpha[i]);
        const double w = mu * (1.0 - mu);
        g += (o.y - mu) * o.r;
        a_mat.selfadjointView<Eigen::Lower>().rankUpdate(o.r, w);
        rd += w * o.r;
        dsum += w;
      }
      if (dsum > 0.0) a_mat.selfadjointView<Eigen::Lower>().rankUpdate(rd, -1.0 / dsum);
    }
    if (g.cwiseAbs().maxCoeff() < 1e-8) {
      res.converged = true;
      break;
    }
    a_mat = a_mat.selfadjointView<Eigen::Lower>();
    Eigen::LDLT<Eigen::MatrixXd> solver(a_mat);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("fe_logit_mle: singular profile information matrix");
    Eigen::VectorXd delta = solver.solve(g);
    double step = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd trial = theta + step * delta;
      const double ll_new = profile_loglik(trial);
      if (ll_new >= ll - 1e-12) {
        theta = trial;
        ll = ll_new;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    if (theta.cwiseAbs().maxCoeff() > 50.0)
      throw std::runtime_error("fe_logit_mle: separation detected (diverging coefficients)");
  }
  res.params.beta = theta.head(spec.K);
  res.params.gamma = theta.tail(spec.p);
  return res;
}

}  // namespace dplogit
