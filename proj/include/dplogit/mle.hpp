#ifndef DPLOGIT_MLE_HPP
#define DPLOGIT_MLE_HPP

#include "dplogit/dataset.hpp"

namespace dplogit {

// Comparison estimators: pooled logit ignoring the fixed effects (with a
// common constant) and the logit that estimates one intercept per individual.

struct PooledLogitResult {
  Parameters params;       // beta then gamma (lag coefficients)
  double intercept = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Newton-Raphson on the pooled log-likelihood over all usable observations
// (outcome, regressors, and all p lags observed).  Throws on separation.
PooledLogitResult pooled_logit_mle(const PanelDataset& data);

struct FeLogitResult {
  Parameters params;
  bool converged = false;
  int iterations = 0;
  long individuals_used = 0;  // individuals with outcome variation
};

// Concentrated Newton: per-individual intercepts solved in an inner loop,
// common parameters updated with the profile score and Hessian.  Individuals
// with all-0 or all-1 observed outcomes drop.
FeLogitResult fe_logit_mle(const PanelDataset& data);

}  // namespace dplogit

#endif  // DPLOGIT_MLE_HPP
