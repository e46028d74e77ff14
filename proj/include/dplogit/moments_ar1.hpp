#ifndef DPLOGIT_MOMENTS_AR1_HPP
#define DPLOGIT_MOMENTS_AR1_HPP

#include <functional>
#include <utility>
#include <vector>

#include "dplogit/common.hpp"
#include "dplogit/model.hpp"
#include "dplogit/simulate.hpp"

namespace dplogit {

// Closed-form moment functions for the AR(1) model.  Each family annihilates
// the conditional outcome distribution for every value of the fixed effect.

enum class Ar1Variant { A, B };

// One member of the general (t,s,r) family: variant, period triple, initial
// condition, and an optional weight on the pre-t outcomes.
struct MomentFamilyAR1 {
  Ar1Variant variant = Ar1Variant::A;
  int t = 1, s = 2, r = 3;  // 1 <= t < s < r <= T
  int y0 = 0;
  // Weight w(y_1, ..., y_{t-1}); empty means constant 1.
  std::function<double(const Eigen::ArrayXi&)> prehistory_weight;
};

// T=3 moment function, the base tables.
double moment_ar1_t3(Ar1Variant variant, int y0, const OutcomePath& y, const RegressorPath& x,
                     const Parameters& params);

// General (t,s,r) moment via single-index differences, multiplied by the
// family's prehistory weight.
double moment_ar1_general(const MomentFamilyAR1& family, const OutcomePath& y, const RegressorPath& x,
                          const Parameters& params);

// T=3 moment divided by the sum of its possible positive summands; bounded in [-1,1].
double moment_ar1_rescaled(Ar1Variant variant, int y0, const OutcomePath& y, const RegressorPath& x,
                           const Parameters& params);

// Positive normalizer for a general (t,s,r) moment.  Depends only on x, the
// parameters and the triple's conditioning outcome y_{t-1}; interior lags that
// are not pinned by the support pattern are bounded by their worst case, so
// the rescaled moment stays valid and bounded for any triple.
double ar1_rescale_denominator(Ar1Variant variant, int t, int s, int r, int y_tm1, const RegressorPath& x,
                               const Parameters& params);

// Transformed moment functions: hbar U_t and hbar Upsilon_t for 2 <= t <= T-1.
// Pointwise they are rescalings of the consecutive-period (t-1,t,t+1) moments.
std::pair<double, double> kitazawa_moments(int t, int y0, const OutcomePath& y, const RegressorPath& x,
                                           const Parameters& params);

// Linear combinations of the T=3 moments that are supported on two outcomes
// when x_2 = x_3; the caller guarantees that restriction and passes x_12'beta.
enum class HkCombination { survivor_y3_0, survivor_y3_1 };
double hk_combination(HkCombination which, int y0, const OutcomePath& y, double x12_beta, const Parameters& params);

// Time-trend reparameterization: both displayed expressions for tau evaluated
// at theta, from the conditional outcome probabilities given y0 = 0 (canonical
// 8-vector).  At theta = exp(beta_0) both equal exp(gamma_0 + beta_0).
std::pair<double, double> tau_curves(const Eigen::VectorXd& prob_table, double theta);

// T=4 linear-dependence identity: (e^gamma - 1) m^{(a)(1,2,3)} expanded in the
// (.,.,4) basis.  Returns both sides evaluated at one outcome.
std::pair<double, double> dependency_identity_t4(int y0, const OutcomePath& y, const RegressorPath& x,
                                                 const Parameters& params);

// Regressor-region predicates used by the identification results (T=3):
// in X_{k,+} the k-th regressor is smallest in period 1 and largest in period 2.
bool in_x_k_plus(const RegressorPath& x, int k);
bool in_x_k_minus(const RegressorPath& x, int k);
// Intersection over k of X_{k, signs[k]}; signs entries are +1 / -1.
std::function<bool(const RegressorPath&)> x_set_predicate(const std::vector<int>& signs);

// Data-generating configuration for Monte Carlo expectations.
struct DgpConfig {
  ModelSpec spec;
  Parameters params;  // truth
  FixedEffectRule fe_rule;
  RegressorRule x_rule;
};

struct MomentMeanEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  long used = 0;   // draws satisfying the conditioning event
  long total = 0;  // draws attempted
};

// Monte Carlo estimate of E[m(Y,X,beta,gamma) | Y0 = family.y0, X in set]
// under the dgp, with the moment evaluated at params_eval.  Identical seeds
// reuse identical draws, so grid evaluations share common random numbers.
MomentMeanEstimate expected_moment_on_set(const MomentFamilyAR1& family, const Parameters& params_eval,
                                          const DgpConfig& dgp,
                                          const std::function<bool(const RegressorPath&)>& set, long draws,
                                          std::uint64_t seed, int n_threads = 1);

// Value table over all 2^T outcomes in canonical order.
Eigen::VectorXd moment_value_table(int T, const std::function<double(const OutcomePath&)>& fn);

}  // namespace dplogit

#endif  // DPLOGIT_MOMENTS_AR1_HPP
