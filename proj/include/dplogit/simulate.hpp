#ifndef DPLOGIT_SIMULATE_HPP
#define DPLOGIT_SIMULATE_HPP

#include <functional>

#include "dplogit/common.hpp"
#include "dplogit/dataset.hpp"

namespace dplogit {

// Rule producing the individual fixed effect, possibly from the drawn
// regressors (all t_obs rows are visible to the rule).
struct FixedEffectRule {
  using Sampler = std::function<double(Rng&, const Eigen::MatrixXd&)>;

  static FixedEffectRule constant(double c) {
    FixedEffectRule r;
    r.fn_ = [c](Rng&, const Eigen::MatrixXd&) { return c; };
    return r;
  }
  // The Monte Carlo designs use scale * sum_t x_{1,t} over all observed periods.
  static FixedEffectRule scaled_regressor_sum(double scale = 0.5) {
    FixedEffectRule r;
    r.fn_ = [scale](Rng&, const Eigen::MatrixXd& x) {
      if (x.cols() == 0) throw std::invalid_argument("scaled_regressor_sum needs K >= 1");
      return scale * x.col(0).sum();
    };
    return r;
  }
  static FixedEffectRule sampler(Sampler fn) {
    FixedEffectRule r;
    r.fn_ = std::move(fn);
    return r;
  }

  double operator()(Rng& rng, const Eigen::MatrixXd& x) const {
    if (!fn_) throw std::invalid_argument("FixedEffectRule not configured");
    return fn_(rng, x);
  }

 private:
  Sampler fn_;
};

// Rule producing a (rows x K) regressor matrix.
struct RegressorRule {
  using Sampler = std::function<Eigen::MatrixXd(Rng&, int rows, int K)>;

  // Design law: X_1 ~ N(0,1) iid over time, X_k = (X_1 + Z_k)/sqrt(2) for k >= 2.
  static RegressorRule design_normal() {
    RegressorRule r;
    r.fn_ = [](Rng& rng, int rows, int K) {
      Eigen::MatrixXd x(rows, K);
      for (int j = 0; j < rows; ++j) {
        for (int k = 0; k < K; ++k) x(j, k) = rng.normal();
        for (int k = 1; k < K; ++k) x(j, k) = (x(j, 0) + x(j, k)) / std::sqrt(2.0);
      }
      return x;
    };
    return r;
  }
  static RegressorRule zero() {
    RegressorRule r;
    r.fn_ = [](Rng&, int rows, int K) { return Eigen::MatrixXd::Zero(rows, K).eval(); };
    return r;
  }
  static RegressorRule sampler(Sampler fn) {
    RegressorRule r;
    r.fn_ = std::move(fn);
    return r;
  }

  Eigen::MatrixXd operator()(Rng& rng, int rows, int K) const {
    if (!fn_) throw std::invalid_argument("RegressorRule not configured");
    Eigen::MatrixXd x = fn_(rng, rows, K);
    if (x.rows() != rows || x.cols() != K) throw std::invalid_argument("RegressorRule: wrong shape");
    return x;
  }

 private:
  Sampler fn_;
};

struct SimulateOptions {
  // Pre-sample lags are 0, as in the Monte Carlo designs.  With
  // stationary_init the chain instead runs burn_in extra periods first.
  bool stationary_init = false;
  int burn_in = 50;
  int n_threads = 1;
};

// Draws n individuals: regressors, fixed effect, then outcomes sequentially
// over all t_obs periods.  Substream (seed, i) per individual makes the result
// independent of the thread count.
PanelDataset simulate_panel(const ModelSpec& spec, const Parameters& params, const FixedEffectRule& fe_rule,
                            const RegressorRule& x_rule, int n, std::uint64_t seed,
                            const SimulateOptions& opts = {});

// Marks each period of each individual unobserved with probability share,
// independently of outcomes.  Deterministic given seed.
void drop_periods(PanelDataset& data, double share, std::uint64_t seed);

}  // namespace dplogit

#endif  // DPLOGIT_SIMULATE_HPP
