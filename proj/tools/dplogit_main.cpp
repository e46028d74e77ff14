// dplogit: moment discovery, simulation, GMM estimation and Monte Carlo
// replication for dynamic panel logit models with fixed effects.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dplogit/csv.hpp"
#include "dplogit/discovery.hpp"
#include "dplogit/experiments.hpp"
#include "dplogit/verify.hpp"

namespace {

using namespace dplogit;

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

Eigen::VectorXd parse_reals(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
  return out;
}

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 1;
  std::string out;
};

int run_verify(const VerifyArgs& args) {
  std::vector<SuiteReport> reports;
  if (args.suite == "all") reports = verify_all(args.seed);
  else if (args.suite == "ar1") reports = {verify_ar1(args.seed)};
  else if (args.suite == "arp") reports = {verify_arp(args.seed)};
  else if (args.suite == "counts") reports = {verify_counts(args.seed)};
  else if (args.suite == "discovery") reports = {verify_discovery(args.seed)};
  else {
    std::cerr << "unknown suite: " << args.suite << " (expected ar1|arp|counts|discovery|all)\n";
    return 2;
  }
  std::ofstream out_file;
  if (!args.out.empty()) {
    out_file.open(args.out);
    out_file << "suite,check,value,tolerance,pass\n";
  }
  bool all_pass = true;
  for (const SuiteReport& rep : reports) {
    for (const CheckResult& c : rep.checks) {
      std::cout << (c.pass ? "PASS" : "FAIL") << "  " << rep.suite << "/" << c.name << "  value=" << c.value
                << "  bound=" << c.tolerance << '\n';
      if (out_file) out_file << rep.suite << ',' << c.name << ',' << c.value << ',' << c.tolerance << ','
                             << (c.pass ? 1 : 0) << '\n';
      all_pass = all_pass && c.pass;
      if (!c.pass) std::cerr << "first failure: " << rep.suite << "/" << c.name << '\n';
    }
  }
  std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic panel logit moment conditions: discovery, simulation, GMM"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  // ---- verify ----
  VerifyArgs vargs;
  CLI::App* verify = app.add_subcommand("verify", "run the identity, equivalence and count suites");
  verify->add_option("--suite", vargs.suite, "ar1|arp|counts|discovery|all");
  verify->add_option("--seed", vargs.seed, "random seed");
  verify->add_option("--out", vargs.out, "write a CSV report");

  // ---- simulate ----
  struct {
    std::string design;
    int p = 1, T = 3, K = 0;
    std::vector<double> beta, gamma;
    std::string fe = "zero";  // zero | varies | const=<c>
    int n = 1000;
    std::uint64_t seed = 1;
    double missing = 0.0;
    std::string out = "panel.csv";
  } sim;
  CLI::App* simulate = app.add_subcommand("simulate", "simulate a panel and write it as CSV");
  simulate->add_option("--design", sim.design, "named design, e.g. ar1-k3-nofe (overrides --p/--T/--K)");
  simulate->add_option("--p", sim.p, "lag order");
  simulate->add_option("--T", sim.T, "modeled periods");
  simulate->add_option("--K", sim.K, "regressor count");
  simulate->add_option("--beta", sim.beta, "beta coefficients");
  simulate->add_option("--gamma", sim.gamma, "lag coefficients");
  simulate->add_option("--fe", sim.fe, "fixed effect rule: zero | varies | const=<c>");
  simulate->add_option("--n", sim.n, "individuals");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--missing", sim.missing, "share of periods dropped at random");
  simulate->add_option("--out", sim.out, "output CSV path");

  // ---- estimate ----
  struct {
    std::string data;
    std::string config_file;
    std::vector<std::string> sets;
    std::string out_prefix = "estimates";
  } est;
  CLI::App* estimate_cmd = app.add_subcommand("estimate", "GMM estimation from a panel CSV");
  estimate_cmd->add_option("--data", est.data, "panel CSV")->required();
  estimate_cmd->add_option("--config", est.config_file, "key=value config file");
  estimate_cmd->add_option("--set", est.sets, "config overrides key=value");
  estimate_cmd->add_option("--out", est.out_prefix, "output prefix (writes <prefix>.csv and <prefix>.log)");

  // ---- discover ----
  struct {
    int p = 1, T = 3, K = 2;
    std::vector<double> beta, gamma;
    std::string x_source = "random";  // random | zero
    std::uint64_t seed = 1;
    int y0_bits = 0;
    bool print_vectors = false;
    bool print_spectrum = false;
  } disc;
  CLI::App* discover = app.add_subcommand("discover", "numerical nullspace of the probability matrix");
  discover->add_option("--p", disc.p, "lag order");
  discover->add_option("--T", disc.T, "modeled periods");
  discover->add_option("--K", disc.K, "regressor count");
  discover->add_option("--beta", disc.beta, "beta (default: random)");
  discover->add_option("--gamma", disc.gamma, "gamma (default: 0.8, 0.5, ...)");
  discover->add_option("--x", disc.x_source, "regressor source: random | zero");
  discover->add_option("--y0", disc.y0_bits, "initial condition as bits (y_1 most significant)");
  discover->add_option("--seed", disc.seed, "random seed");
  discover->add_flag("--vectors", disc.print_vectors, "print the nullspace basis vectors");
  discover->add_flag("--spectrum", disc.print_spectrum, "print the singular spectrum");

  // ---- montecarlo ----
  struct {
    std::string design = "ar1-k3-nofe";
    int n = 2000;
    int reps = 250;
    bool paper_scale = false;
    std::uint64_t seed = 1;
    std::string out_dir = "mc-out";
  } mc;
  CLI::App* montecarlo = app.add_subcommand("montecarlo", "Monte Carlo replication of the study designs");
  montecarlo->add_option("--design", mc.design, "ar1|ar2 - k3|k10 - nofe|fe, e.g. ar2-k10-fe");
  montecarlo->add_option("--n", mc.n, "sample size per replication");
  montecarlo->add_option("--reps", mc.reps, "replications");
  montecarlo->add_flag("--paper-scale", mc.paper_scale, "n=8000 and 2500 replications");
  montecarlo->add_option("--seed", mc.seed, "base seed");
  montecarlo->add_option("--out", mc.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      app.exit(e);
      return 0;
    }
    std::cerr << e.what() << '\n';
    return 2;
  }

  const int n_threads = resolve_threads(threads);

  try {
    if (verify->parsed()) return run_verify(vargs);

    if (simulate->parsed()) {
      PanelDataset data;
      if (!sim.design.empty()) {
        MCDesign design = MCDesign::from_name(sim.design);
        design.n = sim.n;
        design.seed = sim.seed;
        data = simulate_panel(design.spec(), design.truth(), design.fe_rule(), RegressorRule::design_normal(),
                              sim.n, sim.seed, {.n_threads = n_threads});
      } else {
        ModelSpec spec{.p = sim.p, .T = sim.T, .K = sim.K};
        Parameters par;
        par.beta = sim.beta.empty() ? Eigen::VectorXd::Zero(spec.K).eval() : parse_reals(sim.beta);
        par.gamma = sim.gamma.empty() ? Eigen::VectorXd::Zero(spec.p).eval() : parse_reals(sim.gamma);
        if (par.beta.size() != spec.K || par.gamma.size() != spec.p)
          throw CLI::ValidationError("--beta/--gamma", "length mismatch with --K/--p");
        FixedEffectRule fe = FixedEffectRule::constant(0.0);
        if (sim.fe == "varies") fe = FixedEffectRule::scaled_regressor_sum(0.5);
        else if (sim.fe.rfind("const=", 0) == 0) fe = FixedEffectRule::constant(std::stod(sim.fe.substr(6)));
        else if (sim.fe != "zero") throw CLI::ValidationError("--fe", "expected zero | varies | const=<c>");
        const RegressorRule xr = spec.K > 0 ? RegressorRule::design_normal() : RegressorRule::zero();
        data = simulate_panel(spec, par, fe, xr, sim.n, sim.seed, {.n_threads = n_threads});
      }
      if (sim.missing > 0.0) drop_periods(data, sim.missing, sim.seed);
      write_panel_csv(data, sim.out);
      std::cout << "wrote " << sim.out << " (" << data.size() << " individuals, T_obs=" << data.spec.t_obs()
                << ", K=" << data.spec.K << ")\n";
      return 0;
    }

    if (estimate_cmd->parsed()) {
      std::map<std::string, std::string> kv;
      RunConfig cfg;
      if (!est.config_file.empty()) cfg = RunConfig::from_file(est.config_file);
      for (const std::string& s : est.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
      }
      if (!kv.empty()) {
        auto merged = cfg.to_map();
        for (const auto& [k, v] : kv) merged[k] = v;
        cfg = RunConfig::from_map(merged);
      }

      PanelDataset data = read_panel_csv(est.data, cfg.p);
      long skipped = 0;
      for (const Individual& ind : data.individuals) {
        int observed = 0;
        for (int j = 0; j < ind.y.size(); ++j)
          if (ind.outcome_observed(j)) ++observed;
        if (observed < cfg.p + 2) ++skipped;
      }
      if (skipped > 0)
        std::cerr << "warning: " << skipped << " individuals have fewer than p+2 observed periods "
                  << "and contribute no moments\n";

      InstrumentPlan plan;
      plan.kind = cfg.p == 1 ? PlanKind::ar1 : PlanKind::ar2_design;
      if (cfg.p > 2) throw std::runtime_error("estimate: only p=1 and p=2 plans are implemented");
      plan.weight_triplets = cfg.triplet_weighting;
      plan.t_i_counts_outcomes = cfg.t_i_counts_outcomes;

      EstimationConfig ecfg;
      ecfg.weighting = cfg.weighting == "identity" ? EstimationConfig::Weighting::identity
                                                   : EstimationConfig::Weighting::pilot_diagonal;
      ecfg.grad_tol = cfg.grad_tol;
      ecfg.max_iter = cfg.max_iter;
      ecfg.restarts = cfg.restarts;
      ecfg.seed = cfg.seed;
      ecfg.n_threads = n_threads;

      const EstimationResult result = estimate(plan, data, ecfg);
      BootstrapResult boot;
      const bool with_boot = cfg.bootstrap > 0;
      if (with_boot) boot = bootstrap_se(plan, data, ecfg, cfg.bootstrap, cfg.seed ^ 0xb005eedull);

      const std::string csv_path = est.out_prefix + ".csv";
      std::ofstream out(csv_path);
      out.precision(10);
      out << "parameter,estimate,se_sandwich" << (with_boot ? ",se_bootstrap" : "") << '\n';
      const Eigen::VectorXd se = result.sandwich_se();
      const Eigen::VectorXd packed = result.theta_hat.packed();
      for (int k = 0; k < data.spec.K; ++k) {
        out << "beta" << (k + 1) << ',' << packed(k) << ',' << se(k);
        if (with_boot) out << ',' << boot.se(k);
        out << '\n';
      }
      for (int l = 0; l < data.spec.p; ++l) {
        const int j = data.spec.K + l;
        out << "gamma" << (l + 1) << ',' << packed(j) << ',' << se(j);
        if (with_boot) out << ',' << boot.se(j);
        out << '\n';
      }
      std::ofstream log(est.out_prefix + ".log");
      log << "data=" << est.data << "\nindividuals=" << data.size() << "\nmoment_dimension="
          << result.moment_dimension << "\nconverged=" << (result.converged ? "yes" : "no")
          << "\niterations=" << result.iterations << "\nobjective=" << result.objective_value << '\n';
      for (const auto& [k, v] : cfg.to_map()) log << k << '=' << v << '\n';
      if (with_boot) log << "bootstrap_failures=" << boot.failures << '\n';
      std::cout << "wrote " << csv_path << (result.converged ? "" : " (WARNING: optimizer did not converge)")
                << '\n';
      return result.converged ? 0 : 1;
    }

    if (discover->parsed()) {
      ModelSpec spec{.p = disc.p, .T = disc.T, .K = disc.K};
      spec.validate();
      Rng rng(disc.seed);
      Parameters par;
      par.beta.resize(spec.K);
      for (int k = 0; k < spec.K; ++k)
        par.beta(k) = disc.beta.empty() ? rng.uniform(-1.0, 1.0) : disc.beta.at(static_cast<std::size_t>(k));
      par.gamma.resize(spec.p);
      for (int l = 0; l < spec.p; ++l)
        par.gamma(l) = disc.gamma.empty() ? 0.8 / (l + 1.0) : disc.gamma.at(static_cast<std::size_t>(l));
      RegressorPath x = RegressorPath::Zero(spec.T, spec.K);
      if (disc.x_source == "random") {
        for (int t = 0; t < spec.T; ++t)
          for (int k = 0; k < spec.K; ++k) x(t, k) = rng.normal();
      } else if (disc.x_source != "zero") {
        throw CLI::ValidationError("--x", "expected random | zero");
      }
      InitialCondition init(spec.p);
      for (int i = 0; i < spec.p; ++i) init(i) = (disc.y0_bits >> (spec.p - 1 - i)) & 1;

      const ProbabilityMatrix pm = build_probability_matrix(spec, par, init, x, AlphaGrid::standard(spec.T));
      const NullspaceBasis basis = nullspace_basis(pm);
      std::cout << "p=" << spec.p << " T=" << spec.T << " gamma=[" << par.gamma.transpose() << "]\n";
      std::cout << "nullspace dimension: " << basis.dimension() << '\n';
      const long expected = (1LL << spec.T) - (spec.T + 1 - spec.p) * (1LL << spec.p);
      std::cout << "count formula 2^T - (T+1-p)2^p: " << std::max(expected, 0L) << '\n';
      if (basis.ambiguous) std::cout << "warning: ambiguous singular spectrum\n";
      if (disc.print_spectrum)
        std::cout << "singular values:\n" << basis.singular_values.transpose() << '\n';
      if (basis.dimension() == 0)
        std::cout << "no valid moment conditions exist for these inputs (as expected for p=1, T=2 "
                     "with nonzero gamma)\n";
      if (disc.print_vectors && basis.dimension() > 0)
        std::cout << "basis vectors (columns, canonical outcome order):\n" << basis.vectors << '\n';
      return 0;
    }

    if (montecarlo->parsed()) {
      MCDesign design = MCDesign::from_name(mc.design);
      design.n = mc.paper_scale ? 8000 : mc.n;
      design.replications = mc.paper_scale ? 2500 : mc.reps;
      design.seed = mc.seed;
      design.n_threads = n_threads;
      std::filesystem::create_directories(mc.out_dir);
      const MCSummary summary = run_design(design);
      const std::string path = mc.out_dir + "/" + design.name() + "-summary.csv";
      write_mc_summary_csv(summary, path);
      // per-replication gamma draws, for density plots
      std::ofstream draws(mc.out_dir + "/" + design.name() + "-gmm-gamma.csv");
      draws << "replication";
      for (int l = 1; l <= summary.gmm_gamma_draws.cols(); ++l) draws << ",gamma" << l;
      draws << '\n';
      for (Eigen::Index r = 0; r < summary.gmm_gamma_draws.rows(); ++r) {
        draws << r;
        for (Eigen::Index c = 0; c < summary.gmm_gamma_draws.cols(); ++c)
          draws << ',' << summary.gmm_gamma_draws(r, c);
        draws << '\n';
      }
      std::ofstream log(mc.out_dir + "/" + design.name() + ".log");
      log << "design=" << design.name() << "\nn=" << design.n << "\nreplications=" << design.replications
          << "\nseed=" << design.seed << "\nfailure_share=" << summary.failure_share << '\n';
      for (const std::string& f : summary.failure_log) log << f << '\n';
      std::cout << "wrote " << path << '\n';
      for (const EstimatorSummary& est_sum : summary.estimators) {
        std::cout << est_sum.estimator << ": ";
        for (std::size_t j = 0; j < est_sum.parameter.size() && j < 4; ++j)
          std::cout << est_sum.parameter[j] << " bias=" << est_sum.median_bias(j)
                    << " mae=" << est_sum.median_abs_error(j) << "  ";
        std::cout << '\n';
      }
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
