#ifndef DPLOGIT_EXPERIMENTS_HPP
#define DPLOGIT_EXPERIMENTS_HPP

#include <map>
#include <string>
#include <vector>

#include "dplogit/gmm.hpp"
#include "dplogit/simulate.hpp"

namespace dplogit {

// Monte Carlo designs: AR(1) with T_obs = 4 and AR(2) with T_obs = 6,
// K in {3, 10}, fixed effect either 0 or half the sum of the first regressor
// over all observed periods.
struct MCDesign {
  enum class Model { AR1_T3, AR2_T4 };
  enum class FeMode { zero, varies };

  Model model = Model::AR1_T3;
  int K = 3;
  FeMode fe_mode = FeMode::zero;
  int n = 2000;
  int replications = 250;
  std::uint64_t seed = 1;
  int n_threads = 1;

  ModelSpec spec() const;
  Parameters truth() const;  // AR(1): gamma=1; AR(2): gamma=(1,0.5); beta=(1,1,0,...)
  FixedEffectRule fe_rule() const;
  InstrumentPlan plan() const;

  static MCDesign from_name(const std::string& name);  // e.g. "ar1-k3-nofe"
  std::string name() const;
};

// Per-estimator, per-parameter summary over replications.
struct EstimatorSummary {
  std::string estimator;
  std::vector<std::string> parameter;  // "gamma1", ..., "beta1", ...
  Eigen::VectorXd true_value;
  Eigen::VectorXd median_bias;
  Eigen::VectorXd median_abs_error;
  // K = 10 designs additionally report the averages over beta_3..beta_10
  bool has_tail_average = false;
  double tail_avg_bias = 0.0;
  double tail_avg_mae = 0.0;
  long failures = 0;
};

struct MCSummary {
  MCDesign design;
  std::vector<EstimatorSummary> estimators;  // logit, fe_logit, gmm
  long replications_run = 0;
  double failure_share = 0.0;
  std::vector<std::string> failure_log;  // "replication 12: fe_logit: <error>"
  Eigen::MatrixXd gmm_gamma_draws;       // per-replication gamma estimates (densities output)
};

// Runs the full replication loop: simulate, pooled logit, FE logit, GMM.
// Replications with a failing estimator are dropped from that estimator's
// summary; if more than 5% of replications fail the run aborts.
MCSummary run_design(const MCDesign& design);

// Empirical sequence frequencies: AR(1) tabulates (y_0,...,y_3); AR(2)
// tabulates the modeled outcomes (y_1,...,y_4) averaged over initial
// conditions.  Keys are bit strings in canonical order.
std::map<std::string, double> sequence_frequencies(const MCDesign& design, long draws);

// Share of simulated individuals whose outcome path zeroes every moment
// function of the design's plan.
double noninformative_share(const MCDesign& design, long draws);

// CSV emission mirroring the summary layout (estimator x parameter x statistic).
void write_mc_summary_csv(const MCSummary& summary, const std::string& path);

}  // namespace dplogit

#endif  // DPLOGIT_EXPERIMENTS_HPP
