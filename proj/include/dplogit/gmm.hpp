#ifndef DPLOGIT_GMM_HPP
#define DPLOGIT_GMM_HPP

#include <vector>

#include "dplogit/dataset.hpp"
#include "dplogit/mle.hpp"
#include "dplogit/moments_arp.hpp"

namespace dplogit {

// Unconditional moment stacking and GMM estimation.
//
// AR(1) plans stack, for each initial condition j in {0,1},
//   (1, x_ts', x_sr', x_tr') ⊗ (rescaled m^(a), rescaled m^(b))
// over all usable period triplets t < s < r, giving 2*2*(1+3K) moments.
// AR(2) design plans stack, per initial condition in {0,1}^2, the four
// rescaled moment functions plus the interactions of the three regressor
// differences with their sum, giving 4*(4+3K) moments.

enum class PlanKind { ar1, ar2_design };

struct InstrumentPlan {
  PlanKind kind = PlanKind::ar1;
  bool initial_condition_split = true;
  // AR(1) unbalanced handling: weight each triplet by (T_i - 1)/C(T_i, 3).
  bool weight_triplets = true;
  // T_i convention switch: observed modeled periods (default) or observed outcomes.
  bool t_i_counts_outcomes = false;

  int dimension(const ModelSpec& spec) const {
    if (kind == PlanKind::ar1) return 2 * 2 * (1 + 3 * spec.K);
    return 4 * (4 + 3 * spec.K);
  }
};

struct WeightMatrix {
  enum class Form { identity, diagonal_inverse_variance, user };
  Form form = Form::identity;
  Eigen::VectorXd diag;  // diagonal form
  Eigen::MatrixXd full;  // user form (symmetric positive definite)

  double quad(const Eigen::VectorXd& g) const {
    switch (form) {
      case Form::identity: return g.squaredNorm();
      case Form::diagonal_inverse_variance: return g.dot(diag.cwiseProduct(g));
      case Form::user: return g.dot(full * g);
    }
    return g.squaredNorm();
  }
  Eigen::VectorXd apply(const Eigen::VectorXd& g) const {
    switch (form) {
      case Form::identity: return g;
      case Form::diagonal_inverse_variance: return diag.cwiseProduct(g);
      case Form::user: return full * g;
    }
    return g;
  }
};

// One usable AR(1) triplet of modeled periods with its weight.
struct WeightedTriplet {
  int t = 1, s = 2, r = 3;
  double weight = 1.0;
};

// Enumerates, per individual, the fully observed triplets t < s < r
// (requiring y_{t-1}, y_t, y_{s-1}, y_s, y_{r-1}, y_r and x_t, x_s, x_r),
// weighted by (T_i - 1)/C(T_i, 3).
std::vector<std::vector<WeightedTriplet>> triplet_expand(const InstrumentPlan& plan, const PanelDataset& data);

// Per-individual stacked moment vectors (n x dimension).
Eigen::MatrixXd stack_moments(const InstrumentPlan& plan, const PanelDataset& data, const Parameters& params);

// Quadratic form in the summed moment vector.
double gmm_objective(const InstrumentPlan& plan, const PanelDataset& data, const Parameters& params,
                     const WeightMatrix& weight);

struct EstimationConfig {
  enum class Weighting { pilot_diagonal, identity, user };
  Weighting weighting = Weighting::pilot_diagonal;
  WeightMatrix user_weight;
  double grad_tol = 1e-8;
  int max_iter = 500;
  int restarts = 5;
  double jitter = 0.5;
  std::uint64_t seed = 1;
  int n_threads = 1;
  bool compute_sandwich = true;
  // optional optimizer start; the pilot estimate is used when empty
  Eigen::VectorXd start_override;
};

struct EstimationResult {
  Parameters theta_hat;
  double objective_value = 0.0;  // summed-moment quadratic form at the solution
  Eigen::MatrixXd vcov_sandwich;
  Eigen::MatrixXd vcov_bootstrap;  // empty unless bootstrap was run
  bool converged = false;
  int iterations = 0;
  int moment_dimension = 0;
  PooledLogitResult pilot;
  WeightMatrix weight;

  Eigen::VectorXd sandwich_se() const {
    return vcov_sandwich.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
};

// Pilot pooled-logit fit, diagonal weights from the moment second moments at
// the pilot, then quasi-Newton minimization with jittered restarts.
EstimationResult estimate(const InstrumentPlan& plan, const PanelDataset& data, const EstimationConfig& config);

struct BootstrapResult {
  Eigen::VectorXd se;          // IQR / 1.35 per parameter
  Eigen::MatrixXd draws;       // B_ok x nparam successful replication estimates
  Eigen::MatrixXd covariance;  // empirical covariance of the draws
  long failures = 0;
};

// Nonparametric bootstrap over individuals; replication b resamples with
// substream (seed, b) and restarts the optimizer from the full-sample fit.
BootstrapResult bootstrap_se(const InstrumentPlan& plan, const PanelDataset& data, const EstimationConfig& config,
                             int replications, std::uint64_t seed);

}  // namespace dplogit

#endif  // DPLOGIT_GMM_HPP
