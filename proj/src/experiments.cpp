#include "dplogit/experiments.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace dplogit {

ModelSpec MCDesign::spec() const {
  ModelSpec s;
  s.p = model == Model::AR1_T3 ? 1 : 2;
  s.T = model == Model::AR1_T3 ? 3 : 4;
  s.K = K;
  return s;
}

Parameters MCDesign::truth() const {
  const ModelSpec s = spec();
  Parameters par = Parameters::zero(s);
  par.beta(0) = 1.0;
  if (K >= 2) par.beta(1) = 1.0;
  if (model == Model::AR1_T3) {
    par.gamma(0) = 1.0;
  } else {
    par.gamma(0) = 1.0;
    par.gamma(1) = 0.5;
  }
  return par;
}

FixedEffectRule MCDesign::fe_rule() const {
  return fe_mode == FeMode::zero ? FixedEffectRule::constant(0.0) : FixedEffectRule::scaled_regressor_sum(0.5);
}

InstrumentPlan MCDesign::plan() const {
  InstrumentPlan p;
  p.kind = model == Model::AR1_T3 ? PlanKind::ar1 : PlanKind::ar2_design;
  return p;
}

MCDesign MCDesign::from_name(const std::string& name) {
  MCDesign d;
  if (name.rfind("ar1", 0) == 0) d.model = Model::AR1_T3;
  else if (name.rfind("ar2", 0) == 0) d.model = Model::AR2_T4;
  else throw std::invalid_argument("unknown design name: " + name);
  if (name.find("-k3") != std::string::npos) d.K = 3;
  else if (name.find("-k10") != std::string::npos) d.K = 10;
  else throw std::invalid_argument("design name must contain -k3 or -k10: " + name);
  if (name.find("-nofe") != std::string::npos) d.fe_mode = FeMode::zero;
  else if (name.find("-fe") != std::string::npos) d.fe_mode = FeMode::varies;
  else throw std::invalid_argument("design name must contain -nofe or -fe: " + name);
  return d;
}

std::string MCDesign::name() const {
  std::string s = model == Model::AR1_T3 ? "ar1" : "ar2";
  s += "-k" + std::to_string(K);
  s += fe_mode == FeMode::zero ? "-nofe" : "-fe";
  return s;
}

namespace {

std::vector<std::string> parameter_names(const ModelSpec& spec) {
  std::vector<std::string> names;
  for (int l = 1; l <= spec.p; ++l) names.push_back("gamma" + std::to_string(l));
  for (int k = 1; k <= spec.K; ++k) names.push_back("beta" + std::to_string(k));
  return names;
}

// packed order used by the estimators is (beta, gamma); summaries report
// (gamma, beta) to mirror the table layout
Eigen::VectorXd to_report_order(const ModelSpec& spec, const Parameters& par) {
  Eigen::VectorXd v(spec.p + spec.K);
  v.head(spec.p) = par.gamma;
  v.tail(spec.K) = par.beta;
  return v;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

EstimatorSummary summarize(const std::string& name, const ModelSpec& spec, const Parameters& truth,
                           const std::vector<Eigen::VectorXd>& draws, long failures) {
  EstimatorSummary s;
  s.estimator = name;
  s.parameter = parameter_names(spec);
  s.true_value = to_report_order(spec, truth);
  s.failures = failures;
  const int npar = spec.p + spec.K;
  s.median_bias.resize(npar);
  s.median_abs_error.resize(npar);
  for (int j = 0; j < npar; ++j) {
    std::vector<double> err;
    err.reserve(draws.size());
    for (const auto& d : draws) err.push_back(d(j) - s.true_value(j));
    s.median_bias(j) = median_of(err);
    for (double& e : err) e = std::abs(e);
    s.median_abs_error(j) = median_of(err);
  }
  if (spec.K == 10) {
    s.has_tail_average = true;
    double b = 0.0, m = 0.0;
    for (int k = 3; k <= 10; ++k) {
      b += s.median_bias(spec.p + k - 1);
      m += s.median_abs_error(spec.p + k - 1);
    }
    s.tail_avg_bias = b / 8.0;
    s.tail_avg_mae = m / 8.0;
  }
  return s;
}

}  // namespace

MCSummary run_design(const MCDesign& design) {
  const ModelSpec spec = design.spec();
  const Parameters truth = design.truth();
  const InstrumentPlan plan = design.plan();
  const int npar = spec.p + spec.K;

  std::vector<Eigen::VectorXd> logit_draws, fe_draws, gmm_draws;
  std::vector<std::string> failure_log;
  std::vector<int> rep_failed(design.replications, 0);
  std::vector<Eigen::VectorXd> logit_all(design.replications), fe_all(design.replications), gmm_all(design.replications);
  std::vector<std::string> errors(design.replications);

  parallel_for(static_cast<std::size_t>(design.replications), design.n_threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = design.seed + 0x1000ull * (rep + 1);
    PanelDataset data =
        simulate_panel(spec, truth, design.fe_rule(), RegressorRule::design_normal(), design.n, rep_seed, {});
    auto record_failure = [&](const std::string& which, const std::string& what) {
      rep_failed[rep] = 1;
      errors[rep] += (errors[rep].empty() ? "" : "; ") + which + ": " + what;
    };
    try {
      const PooledLogitResult r = pooled_logit_mle(data);
      if (!r.converged) throw std::runtime_error("no convergence");
      logit_all[rep] = to_report_order(spec, r.params);
    } catch (const std::exception& e) {
      record_failure("logit", e.what());
    }
    try {
      const FeLogitResult r = fe_logit_mle(data);
      if (!r.converged) throw std::runtime_error("no convergence");
      fe_all[rep] = to_report_order(spec, r.params);
    } catch (const std::exception& e) {
      record_failure("fe_logit", e.what());
    }
    try {
      EstimationConfig cfg;
      cfg.seed = rep_seed ^ 0x5eedull;
      cfg.compute_sandwich = false;
      const EstimationResult r = estimate(plan, data, cfg);
      if (!r.converged) throw std::runtime_error("no convergence");
      gmm_all[rep] = to_report_order(spec, r.theta_hat);
    } catch (const std::exception& e) {
      record_failure("gmm", e.what());
    }
  });

  long failures = 0;
  long logit_fail = 0, fe_fail = 0, gmm_fail = 0;
  for (int rep = 0; rep < design.replications; ++rep) {
    if (rep_failed[rep]) {
      ++failures;
      failure_log.push_back("replication " + std::to_string(rep) + ": " + errors[rep]);
    }
    if (logit_all[rep].size() == npar) logit_draws.push_back(logit_all[rep]); else ++logit_fail;
    if (fe_all[rep].size() == npar) fe_draws.push_back(fe_all[rep]); else ++fe_fail;
    if (gmm_all[rep].size() == npar) gmm_draws.push_back(gmm_all[rep]); else ++gmm_fail;
  }

  MCSummary summary;
  summary.design = design;
  summary.replications_run = design.replications;
  summary.failure_share = static_cast<double>(failures) / design.replications;
  summary.failure_log = std::move(failure_log);
  if (summary.failure_share > 0.05)
    throw std::runtime_error("run_design: more than 5% of replications failed (" +
                             std::to_string(failures) + "/" + std::to_string(design.replications) + ")");

  summary.estimators.push_back(summarize("logit", spec, truth, logit_draws, logit_fail));
  summary.estimators.push_back(summarize("fe_logit", spec, truth, fe_draws, fe_fail));
  summary.estimators.push_back(summarize("gmm", spec, truth, gmm_draws, gmm_fail));

  summary.gmm_gamma_draws.resize(static_cast<Eigen::Index>(gmm_draws.size()), spec.p);
  for (std::size_t i = 0; i < gmm_draws.size(); ++i)
    summary.gmm_gamma_draws.row(static_cast<Eigen::Index>(i)) = gmm_draws[i].head(spec.p).transpose();
  return summary;
}

std::map<std::string, double> sequence_frequencies(const MCDesign& design, long draws) {
  const ModelSpec spec = design.spec();
  const Parameters truth = design.truth();
  PanelDataset data = simulate_panel(spec, truth, design.fe_rule(), RegressorRule::design_normal(),
                                     static_cast<int>(draws), design.seed,
                                     {.n_threads = design.n_threads});
  // AR(1): all observed outcomes (y_0..y_3); AR(2): modeled outcomes (y_1..y_4)
  const int width = 4;
  const int offset = design.model == MCDesign::Model::AR1_T3 ? 0 : spec.p;
  std::map<std::string, double> freq;
  for (int pattern = 0; pattern < (1 << width); ++pattern) {
    std::string key;
    for (int b = width - 1; b >= 0; --b) key += ((pattern >> b) & 1) ? '1' : '0';
    freq[key] = 0.0;
  }
  for (const Individual& ind : data.individuals) {
    std::string key;
    for (int j = offset; j < offset + width; ++j) key += ind.y(j) ? '1' : '0';
    freq[key] += 1.0;
  }
  for (auto& kv : freq) kv.second /= static_cast<double>(draws);
  return freq;
}

double noninformative_share(const MCDesign& design, long draws) {
  const ModelSpec spec = design.spec();
  const Parameters truth = design.truth();
  PanelDataset data = simulate_panel(spec, truth, design.fe_rule(), RegressorRule::design_normal(),
                                     static_cast<int>(draws), design.seed,
                                     {.n_threads = design.n_threads});
  long dead = 0;
  for (const Individual& ind : data.individuals) {
    const OutcomePath y = data.outcomes(ind);
    const RegressorPath x = data.regressors(ind);
    bool all_zero = true;
    if (design.model == MCDesign::Model::AR1_T3) {
      const int y0 = ind.y(0);
      for (int v = 0; v < 2 && all_zero; ++v)
        all_zero = moment_ar1_t3(v == 0 ? Ar1Variant::A : Ar1Variant::B, y0, y, x, truth) == 0.0;
    } else {
      const InitialCondition y0 = data.initial_condition(ind);
      for (int v = 0; v < 4 && all_zero; ++v)
        all_zero = moment_p2_t4(static_cast<P2T4Variant>(v), y0, y, x, truth) == 0.0;
    }
    if (all_zero) ++dead;
  }
  return static_cast<double>(dead) / static_cast<double>(draws);
}

void write_mc_summary_csv(const MCSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "design,estimator,parameter,true,median_bias,median_abs_error,failures\n";
  for (const EstimatorSummary& est : summary.estimators) {
    for (std::size_t j = 0; j < est.parameter.size(); ++j)
      out << summary.design.name() << ',' << est.estimator << ',' << est.parameter[j] << ',' << est.true_value(j)
          << ',' << est.median_bias(j) << ',' << est.median_abs_error(j) << ',' << est.failures << '\n';
    if (est.has_tail_average)
      out << summary.design.name() << ',' << est.estimator << ",beta_k_ge3_avg,0," << est.tail_avg_bias << ','
          << est.tail_avg_mae << ',' << est.failures << '\n';
  }
}

}  // namespace dplogit
