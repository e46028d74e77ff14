#ifndef DPLOGIT_MODEL_HPP
#define DPLOGIT_MODEL_HPP

#include <Eigen/Dense>
#include <stdexcept>

namespace dplogit {

// Dynamic panel logit AR(p): outcome probabilities conditional on p initial
// outcomes, strictly exogenous regressors, common parameters and a scalar
// fixed effect.  T counts the modeled periods; T + p periods are observed.
struct ModelSpec {
  int p = 1;  // lag order
  int T = 3;  // modeled periods
  int K = 0;  // regressor count

  int t_obs() const { return T + p; }
  int n_outcomes() const { return 1 << T; }

  void validate() const {
    if (p < 1 || T < 1 || K < 0) throw std::invalid_argument("ModelSpec: need p>=1, T>=1, K>=0");
    if (T > 30) throw std::invalid_argument("ModelSpec: T too large to enumerate outcomes");
  }
};

struct Parameters {
  Eigen::VectorXd beta;   // length K
  Eigen::VectorXd gamma;  // length p

  static Parameters zero(const ModelSpec& spec) {
    Parameters par;
    par.beta = Eigen::VectorXd::Zero(spec.K);
    par.gamma = Eigen::VectorXd::Zero(spec.p);
    return par;
  }

  Eigen::VectorXd packed() const {
    Eigen::VectorXd v(beta.size() + gamma.size());
    v << beta, gamma;
    return v;
  }
  static Parameters unpack(const ModelSpec& spec, const Eigen::VectorXd& v) {
    if (v.size() != spec.K + spec.p) throw std::invalid_argument("Parameters::unpack: wrong length");
    Parameters par;
    par.beta = v.head(spec.K);
    par.gamma = v.tail(spec.p);
    return par;
  }
};

// Initial condition vector ordered (y_{1-p}, ..., y_0).
using InitialCondition = Eigen::ArrayXi;
// Modeled outcomes (y_1, ..., y_T).
using OutcomePath = Eigen::ArrayXi;
// Modeled-period regressors, T rows by K columns.
using RegressorPath = Eigen::MatrixXd;

// Canonical outcome order: y_1 is the most significant bit, so index 0 is the
// all-zeros path and index 2^T - 1 the all-ones path.
inline OutcomePath outcome_from_index(int T, int index) {
  OutcomePath y(T);
  for (int t = 1; t <= T; ++t) y(t - 1) = (index >> (T - t)) & 1;
  return y;
}

inline int index_of_outcome(const OutcomePath& y) {
  int idx = 0;
  for (int i = 0; i < y.size(); ++i) idx = (idx << 1) | (y(i) & 1);
  return idx;
}

// Outcome at period j where j may reach into the initial condition (j <= 0).
inline int lagged_outcome(const ModelSpec& spec, const InitialCondition& y0, const OutcomePath& y, int j) {
  if (j >= 1) return y(j - 1);
  return y0(j + spec.p - 1);
}

// Single index z_t = x_t'beta + sum_l y_{t-l} gamma_l, the parameter-bearing
// part of the period-t logit argument.
double single_index(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                    const OutcomePath& y, const RegressorPath& x, int t);

// Pairwise difference z_t - z_s.
double single_index_diff(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                         const OutcomePath& y, const RegressorPath& x, int t, int s);

// Probability of a full outcome path given alpha; product of T logistic
// factors, each evaluated overflow-safely.
double sequence_probability(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                            const OutcomePath& y, const RegressorPath& x, double alpha);

struct ProbabilityVector {
  Eigen::VectorXd probs;  // length 2^T, canonical order
  double alpha = 0.0;
};

// All 2^T path probabilities for a fixed alpha.
ProbabilityVector probability_vector(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                                     const RegressorPath& x, double alpha);

}  // namespace dplogit

#endif  // DPLOGIT_MODEL_HPP
