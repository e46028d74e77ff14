#include "dplogit/model.hpp"

#include "dplogit/common.hpp"

namespace dplogit {

double single_index(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                    const OutcomePath& y, const RegressorPath& x, int t) {
  if (t < 1 || t > spec.T) throw std::out_of_range("single_index: period out of range");
  double z = 0.0;
  if (spec.K > 0) z = x.row(t - 1).dot(params.beta);
  for (int l = 1; l <= spec.p; ++l) z += lagged_outcome(spec, y0, y, t - l) * params.gamma(l - 1);
  return z;
}

double single_index_diff(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                         const OutcomePath& y, const RegressorPath& x, int t, int s) {
  return single_index(spec, params, y0, y, x, t) - single_index(spec, params, y0, y, x, s);
}

double sequence_probability(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                            const OutcomePath& y, const RegressorPath& x, double alpha) {
  double prob = 1.0;
  for (int t = 1; t <= spec.T; ++t) {
    const double z = single_index(spec, params, y0, y, x, t) + alpha;
    prob *= inv_logit_complement((1 - 2 * y(t - 1)) * z);
  }
  return prob;
}

ProbabilityVector probability_vector(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                                     const RegressorPath& x, double alpha) {
  ProbabilityVector pv;
  pv.alpha = alpha;
  const int n = spec.n_outcomes();
  pv.probs.resize(n);
  for (int idx = 0; idx < n; ++idx) {
    const OutcomePath y = outcome_from_index(spec.T, idx);
    pv.probs(idx) = sequence_probability(spec, params, y0, y, x, alpha);
  }
  return pv;
}

}  // namespace dplogit
