#ifndef DPLOGIT_DATASET_HPP
#define DPLOGIT_DATASET_HPP

#include <string>
#include <vector>

#include "dplogit/model.hpp"

namespace dplogit {

// One individual's observed series over the t_obs calendar periods.
// Unobserved outcomes are -1; unobserved regressor rows are NaN.
struct Individual {
  std::string id;
  Eigen::ArrayXi y;    // length t_obs
  Eigen::MatrixXd x;   // t_obs x K

  bool outcome_observed(int j) const { return y(j) >= 0; }
  bool regressors_observed(int j) const { return x.cols() == 0 || x.row(j).allFinite(); }
  bool fully_observed() const {
    for (int j = 0; j < y.size(); ++j)
      if (!outcome_observed(j) || !regressors_observed(j)) return false;
    return true;
  }
};

struct PanelDataset {
  ModelSpec spec;
  std::vector<Individual> individuals;

  std::size_t size() const { return individuals.size(); }

  // Initial condition (first p observed-calendar outcomes) of a balanced individual.
  InitialCondition initial_condition(const Individual& ind) const { return ind.y.head(spec.p); }
  // Modeled outcomes y_1..y_T.
  OutcomePath outcomes(const Individual& ind) const { return ind.y.tail(spec.T); }
  // Modeled-period regressors (T x K).
  RegressorPath regressors(const Individual& ind) const { return ind.x.bottomRows(spec.T); }
};

}  // namespace dplogit

#endif  // DPLOGIT_DATASET_HPP
