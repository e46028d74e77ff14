#include "dplogit/gmm.hpp"

#include <algorithm>
#include <cmath>

#include "dplogit/optim.hpp"

namespace dplogit {

namespace {

double binom3(int n) { return n < 3 ? 0.0 : n * (n - 1.0) * (n - 2.0) / 6.0; }

// AR(2) T=4 rescale normalizer: one plus the absolute values of every
// exponential summand that can appear in the variant's nonzero entries, each
// evaluated at the support row that produces it.  All are functions of the
// initial condition, regressors and parameters only.
double p2_t4_rescale_denominator(P2T4Variant variant, const InitialCondition& y0, const RegressorPath& x,
                                 const Parameters& params) {
  ModelSpec spec;
  spec.p = 2;
  spec.T = 4;
  spec.K = static_cast<int>(x.cols());
  const double g1 = params.gamma(0);
  const auto z_at = [&](std::initializer_list<int> pattern, int a, int b) {
    OutcomePath y(4);
    int i = 0;
    for (int v : pattern) y(i++) = v;
    return single_index_diff(spec, params, y0, y, x, a, b);
  };
  const auto E = [](double v) { return std::exp(v); };

  double den = 1.0;
  switch (variant) {
    case P2T4Variant::A: {
      den += E(z_at({0, 0, 1, 0}, 2, 3)) + E(z_at({0, 0, 1, 0}, 4, 3));
      den += E(z_at({0, 0, 1, 1}, 2, 4));
      den += E(z_at({1, 0, 0, 0}, 4, 1) + g1);
      const double z41 = z_at({1, 0, 1, 0}, 4, 1);
      den += E(z41) + E(z41 + z_at({1, 0, 1, 0}, 2, 3)) + E(z41 + z_at({1, 0, 1, 0}, 4, 3));
      den += E(z_at({1, 0, 1, 1}, 2, 1));
      break;
    }
    case P2T4Variant::B: {
      den += E(z_at({0, 1, 0, 0}, 1, 2));
      const double z14 = z_at({0, 1, 0, 1}, 1, 4);
      den += E(z14) + E(z14 + z_at({0, 1, 0, 1}, 3, 2)) + E(z14 + z_at({0, 1, 0, 1}, 3, 4));
      den += E(z_at({0, 1, 1, 0}, 1, 4) + g1);
      den += E(z_at({1, 1, 0, 0}, 4, 2));
      den += E(z_at({1, 1, 0, 1}, 3, 2)) + E(z_at({1, 1, 0, 1}, 3, 4));
      break;
    }
    case P2T4Variant::C: {
      const double z24 = z_at({0, 0, 0, 1}, 2, 4);
      const double z34 = z_at({0, 0, 0, 1}, 3, 4);
      den += E(z24) + E(z34) + E(z24 + z34);
      den += E(z_at({0, 0, 1, 0}, 2, 4) + g1);
      den += E(z_at({1, 0, 0, 0}, 4, 1));
      const double z21 = z_at({1, 0, 0, 1}, 2, 1);
      den += E(z21) + E(z21 + z_at({1, 0, 0, 1}, 3, 2)) + E(z21 + z_at({1, 0, 0, 1}, 3, 4));
      den += E(z_at({1, 0, 1, 0}, 2, 1));
      break;
    }
    case P2T4Variant::D: {
      den += E(z_at({0, 1, 0, 0}, 1, 2));
      const double z12 = z_at({0, 1, 1, 0}, 1, 2);
      den += E(z12) + E(z12 + z_at({0, 1, 1, 0}, 2, 3)) + E(z12 + z_at({0, 1, 1, 0}, 4, 3));
      den += E(z_at({0, 1, 1, 1}, 1, 4));
      den += E(z_at({1, 1, 0, 0}, 4, 2) + g1);
      const double z42 = z_at({1, 1, 1, 0}, 4, 2);
      const double z43 = z_at({1, 1, 1, 0}, 4, 3);
      den += E(z42) + E(z43) + E(z42 + z43);
      break;
    }
  }
  return den;
}

// Accumulates one AR(1) triplet's contribution into the stacked vector.
void accumulate_ar1(const Individual& ind, const ModelSpec& spec, const Parameters& params,
                    const WeightedTriplet& wt, Eigen::Ref<Eigen::VectorXd> out) {
  const int K = spec.K;
  const int block = 2 * (1 + 3 * K);  // per initial condition, interleaved (a,b)
  const int t = wt.t, s = wt.s, r = wt.r;
  // calendar index of modeled period u is u (p = 1)
  const int j = ind.y(t - 1);  // y_{t-1}: conditioning outcome of the triplet

  OutcomePath y = ind.y.tail(spec.T);
  RegressorPath x = ind.x.bottomRows(spec.T);

  MomentFamilyAR1 fam;
  fam.t = t;
  fam.s = s;
  fam.r = r;
  fam.y0 = (t == 1) ? ind.y(0) : 0;

  fam.variant = Ar1Variant::A;
  const double ma = moment_ar1_general(fam, y, x, params) /
                    ar1_rescale_denominator(Ar1Variant::A, t, s, r, j, x, params);
  fam.variant = Ar1Variant::B;
  const double mb = moment_ar1_general(fam, y, x, params) /
                    ar1_rescale_denominator(Ar1Variant::B, t, s, r, j, x, params);

  const int base = j * block;
  out(base) += wt.weight * ma;
  out(base + 1) += wt.weight * mb;
  if (K > 0) {
    const auto put = [&](int group, const Eigen::RowVectorXd& xd) {
      for (int k = 0; k < K; ++k) {
        out(base + 2 * (1 + group * K + k)) += wt.weight * xd(k) * ma;
        out(base + 2 * (1 + group * K + k) + 1) += wt.weight * xd(k) * mb;
      }
    };
    put(0, x.row(t - 1) - x.row(s - 1));
    put(1, x.row(s - 1) - x.row(r - 1));
    put(2, x.row(t - 1) - x.row(r - 1));
  }
}

// Enumerates AR(2) windows of six consecutive fully observed periods and
// accumulates the per-window contribution.
void accumulate_ar2(const Individual& ind, const ModelSpec& spec, const Parameters& params,
                    Eigen::Ref<Eigen::VectorXd> out) {
  const int K = spec.K;
  const int block = 4 + 3 * K;
  const int t_obs = static_cast<int>(ind.y.size());
  for (int w = 0; w + 6 <= t_obs; ++w) {
    bool ok = true;
    for (int j = w; j < w + 6; ++j) ok = ok && ind.outcome_observed(j);
    for (int j = w + 2; j < w + 6; ++j) ok = ok && ind.regressors_observed(j);
    if (!ok) continue;

    InitialCondition y0(2);
    y0 << ind.y(w), ind.y(w + 1);
    OutcomePath y = ind.y.segment(w + 2, 4);
    RegressorPath x = ind.x.middleRows(w + 2, 4);

    const int base = (2 * y0(0) + y0(1)) * block;
    double msum = 0.0;
    for (int v = 0; v < 4; ++v) {
      const auto variant = static_cast<P2T4Variant>(v);
      const double m = moment_p2_t4(variant, y0, y, x, params) / p2_t4_rescale_denominator(variant, y0, x, params);
      out(base + v) += m;
      msum += m;
    }
    if (K > 0) {
      for (int d = 0; d < 3; ++d) {
        const Eigen::RowVectorXd xd = x.row(d + 1) - x.row(d);
        for (int k = 0; k < K; ++k) out(base + 4 + d * K + k) += xd(k) * msum;
      }
    }
  }
}

}  // namespace

std::vector<std::vector<WeightedTriplet>> triplet_expand(const InstrumentPlan& plan, const PanelDataset& data) {
  if (plan.kind != PlanKind::ar1) throw std::invalid_argument("triplet_expand: AR(1) plans only");
  if (data.spec.p != 1) throw std::invalid_argument("triplet_expand: p = 1 required");
  const int T = data.spec.T;
  std::vector<std::vector<WeightedTriplet>> result(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Individual& ind = data.individuals[i];
    // usable modeled period: outcome, its lag, and its regressors observed
    std::vector<bool> usable(T + 1, false);
    int t_i = 0;
    for (int t = 1; t <= T; ++t) {
      usable[t] = ind.outcome_observed(t) && ind.outcome_observed(t - 1) && ind.regressors_observed(t);
      if (usable[t]) ++t_i;
    }
    if (plan.t_i_counts_outcomes) {
      t_i = 0;
      for (int j = 0; j < ind.y.size(); ++j)
        if (ind.outcome_observed(j)) ++t_i;
    }
    const double weight =
        plan.weight_triplets ? (t_i - 1.0) / std::max(binom3(t_i), 1.0) : 1.0;
    for (int t = 1; t <= T - 2; ++t)
      for (int s = t + 1; s <= T - 1; ++s)
        for (int r = s + 1; r <= T; ++r)
          if (usable[t] && usable[s] && usable[r]) result[i].push_back({t, s, r, weight});
  }
  return result;
}

Eigen::MatrixXd stack_moments(const InstrumentPlan& plan, const PanelDataset& data, const Parameters& params) {
  const ModelSpec& spec = data.spec;
  const int dim = plan.dimension(spec);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.size()), dim);
  if (plan.kind == PlanKind::ar1) {
    const auto triplets = triplet_expand(plan, data);
    for (std::size_t i = 0; i < data.size(); ++i) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
      for (const WeightedTriplet& wt : triplets[i]) accumulate_ar1(data.individuals[i], spec, params, wt, row);
      m.row(i) = row.transpose();
    }
  } else {
    if (spec.p != 2) throw std::invalid_argument("stack_moments: AR(2) plan requires p = 2");
    for (std::size_t i = 0; i < data.size(); ++i) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
      accumulate_ar2(data.individuals[i], spec, params, row);
      m.row(i) = row.transpose();
    }
  }
  return m;
}

double gmm_objective(const InstrumentPlan& plan, const PanelDataset& data, const Parameters& params,
                     const WeightMatrix& weight) {
  const Eigen::VectorXd g = stack_moments(plan, data, params).colwise().sum().transpose();
  return weight.quad(g);
}

namespace {

WeightMatrix pilot_weight(const InstrumentPlan& plan, const PanelDataset& data, const Parameters& pilot_params) {
  const Eigen::MatrixXd m = stack_moments(plan, data, pilot_params);
  // uncentered second moment per column; at a consistent pilot the moment
  // means are near zero, and the uncentered form is always nonnegative
  Eigen::VectorXd v = m.array().square().colwise().mean().transpose();
  const double vmax = v.maxCoeff();
  if (!(vmax > 0.0)) {
    WeightMatrix w;
    w.form = WeightMatrix::Form::identity;
    return w;
  }
  const double floor = 1e-12 * vmax;
  WeightMatrix w;
  w.form = WeightMatrix::Form::diagonal_inverse_variance;
  w.diag.resize(v.size());
  // zero-variance moments (never active in this sample) get weight zero
  for (int j = 0; j < v.size(); ++j) w.diag(j) = v(j) < floor ? 0.0 : 1.0 / v(j);
  return w;
}

}  // namespace

EstimationResult estimate(const InstrumentPlan& plan, const PanelDataset& data, const EstimationConfig& config) {
  const ModelSpec& spec = data.spec;
  if (data.individuals.empty()) throw std::invalid_argument("estimate: empty dataset");
  const int nparam = spec.K + spec.p;
  const int dim = plan.dimension(spec);
  if (dim < nparam) throw std::invalid_argument("estimate: moment dimension below parameter dimension");

  EstimationResult res;
  res.moment_dimension = dim;

  // pilot and weights
  Eigen::VectorXd start;
  switch (config.weighting) {
    case EstimationConfig::Weighting::pilot_diagonal: {
      try {
        res.pilot = pooled_logit_mle(data);
        res.weight = pilot_weight(plan, data, res.pilot.params);
        start = res.pilot.params.packed();
      } catch (const std::exception&) {
        // pilot failed: identity weights, zero start
        res.weight.form = WeightMatrix::Form::identity;
        start = Eigen::VectorXd::Zero(nparam);
      }
      break;
    }
    case EstimationConfig::Weighting::identity:
      res.weight.form = WeightMatrix::Form::identity;
      try {
        res.pilot = pooled_logit_mle(data);
        start = res.pilot.params.packed();
      } catch (const std::exception&) {
        start = Eigen::VectorXd::Zero(nparam);
      }
      break;
    case EstimationConfig::Weighting::user:
      res.weight = config.user_weight;
      try {
        res.pilot = pooled_logit_mle(data);
        start = res.pilot.params.packed();
      } catch (const std::exception&) {
        start = Eigen::VectorXd::Zero(nparam);
      }
      break;
  }

  const double n = static_cast<double>(data.size());
  const auto objective = [&](const Eigen::VectorXd& v) {
    const Parameters par = Parameters::unpack(spec, v);
    const Eigen::VectorXd g = stack_moments(plan, data, par).colwise().sum().transpose() / n;
    return res.weight.quad(g);
  };

  if (config.start_override.size() == nparam) start = config.start_override;

  MinimizeOptions mopts;
  mopts.grad_tol = config.grad_tol;
  mopts.max_iter = config.max_iter;

  MinimizeResult best;
  bool have_best = false;
  int confirmations = 0;
  for (int attempt = 0; attempt <= config.restarts; ++attempt) {
    Eigen::VectorXd x0 = start;
    if (attempt > 0) {
      Rng rng(config.seed, static_cast<std::uint64_t>(attempt));
      for (int j = 0; j < x0.size(); ++j) x0(j) += rng.uniform(-config.jitter, config.jitter);
    }
    MinimizeResult r = minimize_bfgs(objective, x0, mopts);
    if (have_best && r.converged && best.converged && std::abs(r.f - best.f) <= 1e-10 * (1.0 + std::abs(best.f)))
      ++confirmations;
    const bool better = !have_best || (r.converged && !best.converged) ||
                        (r.converged == best.converged && r.f < best.f);
    if (better) {
      best = r;
      have_best = true;
    }
    // a restart re-finding the same converged minimum is evidence enough
    if (best.converged && confirmations >= 1) break;
  }

  res.theta_hat = Parameters::unpack(spec, best.x);
  res.converged = best.converged;
  res.iterations = best.iterations;
  res.objective_value = best.f * n * n;  // summed-moment scale

  if (config.compute_sandwich) {
    const Eigen::MatrixXd m = stack_moments(plan, data, res.theta_hat);
    const Eigen::VectorXd gbar = m.colwise().mean().transpose();
    Eigen::MatrixXd omega = (m.transpose() * m) / n - gbar * gbar.transpose();

    // central-difference Jacobian of the mean moments
    Eigen::MatrixXd jac(dim, nparam);
    Eigen::VectorXd v = best.x;
    for (int j = 0; j < nparam; ++j) {
      const double h = 5e-6 * (1.0 + std::abs(v(j)));
      Eigen::VectorXd vp = v, vm = v;
      vp(j) += h;
      vm(j) -= h;
      const Eigen::VectorXd gp =
          stack_moments(plan, data, Parameters::unpack(spec, vp)).colwise().mean().transpose();
      const Eigen::VectorXd gm =
          stack_moments(plan, data, Parameters::unpack(spec, vm)).colwise().mean().transpose();
      jac.col(j) = (gp - gm) / (2.0 * h);
    }
    Eigen::MatrixXd wg(dim, nparam);
    for (int j = 0; j < nparam; ++j) wg.col(j) = res.weight.apply(jac.col(j));
    const Eigen::MatrixXd a = jac.transpose() * wg;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw std::runtime_error("estimate: singular G'WG in the sandwich variance");
    const Eigen::MatrixXd a_inv = lu.inverse();
    Eigen::MatrixXd womegaw(dim, dim);
    // W Omega W with W applied column- and row-wise
    Eigen::MatrixXd womega(dim, dim);
    for (int j = 0; j < dim; ++j) womega.col(j) = res.weight.apply(omega.col(j));
    for (int j = 0; j < dim; ++j) womegaw.row(j) = res.weight.apply(womega.row(j).transpose()).transpose();
    res.vcov_sandwich = a_inv * jac.transpose() * womegaw * jac * a_inv / n;
    res.vcov_sandwich = 0.5 * (res.vcov_sandwich + res.vcov_sandwich.transpose());
  }
  return res;
}

BootstrapResult bootstrap_se(const InstrumentPlan& plan, const PanelDataset& data, const EstimationConfig& config,
                             int replications, std::uint64_t seed) {
  if (replications < 2) throw std::invalid_argument("bootstrap_se: at least 2 replications required");
  const int nparam = data.spec.K + data.spec.p;
  const std::size_t n = data.size();

  // full-sample fit provides the restart point
  EstimationConfig base_config = config;
  base_config.compute_sandwich = false;
  const EstimationResult full = estimate(plan, data, base_config);

  Eigen::MatrixXd draws(replications, nparam);
  std::vector<char> ok(static_cast<std::size_t>(replications), 0);

  EstimationConfig rep_config = config;
  rep_config.compute_sandwich = false;
  rep_config.restarts = 1;
  rep_config.n_threads = 1;
  rep_config.start_override = full.theta_hat.packed();

  parallel_for(static_cast<std::size_t>(replications), config.n_threads, [&](std::size_t b) {
    Rng rng(seed, b);
    PanelDataset resample;
    resample.spec = data.spec;
    resample.individuals.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      resample.individuals.push_back(data.individuals[rng.below(n)]);
    try {
      EstimationConfig cfg = rep_config;
      cfg.seed = seed ^ (b + 1);
      EstimationResult r = estimate(plan, resample, cfg);
      draws.row(static_cast<Eigen::Index>(b)) = r.theta_hat.packed().transpose();
      ok[b] = r.converged ? 1 : 0;
    } catch (const std::exception&) {
      ok[b] = 0;
    }
  });

  long n_ok = 0;
  for (char c : ok) n_ok += c;
  BootstrapResult result;
  result.failures = replications - n_ok;
  if (n_ok == 0) throw std::runtime_error("bootstrap_se: all resamples failed to converge");

  result.draws.resize(n_ok, nparam);
  Eigen::Index row = 0;
  for (int b = 0; b < replications; ++b)
    if (ok[static_cast<std::size_t>(b)]) result.draws.row(row++) = draws.row(b);

  const auto quantile = [](std::vector<double>& v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
  };

  result.se.resize(nparam);
  for (int j = 0; j < nparam; ++j) {
    std::vector<double> col(result.draws.col(j).data(), result.draws.col(j).data() + n_ok);
    result.se(j) = (quantile(col, 0.75) - quantile(col, 0.25)) / 1.35;
  }
  const Eigen::RowVectorXd mean = result.draws.colwise().mean();
  const Eigen::MatrixXd centered = result.draws.rowwise() - mean;
  result.covariance = centered.transpose() * centered / std::max<double>(1.0, n_ok - 1.0);
  return result;
}

}  // namespace dplogit
