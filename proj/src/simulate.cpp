#include "dplogit/simulate.hpp"

#include <limits>

namespace dplogit {

namespace {

// Sequential outcome draw over rows of x, lags initialized from `lags`
// (ordered oldest..newest, length p).
void draw_outcomes(const ModelSpec& spec, const Parameters& params, const Eigen::MatrixXd& x, double alpha,
                   Eigen::ArrayXi& lags, Rng& rng, Eigen::ArrayXi* out) {
  const int rows = static_cast<int>(x.rows());
  for (int j = 0; j < rows; ++j) {
    double z = alpha;
    if (spec.K > 0) z += x.row(j).dot(params.beta);
    for (int l = 1; l <= spec.p; ++l) z += lags(spec.p - l) * params.gamma(l - 1);
    const int y = rng.bernoulli(logistic(z)) ? 1 : 0;
    if (out) (*out)(j) = y;
    for (int l = 0; l + 1 < spec.p; ++l) lags(l) = lags(l + 1);
    lags(spec.p - 1) = y;
  }
}

}  // namespace

PanelDataset simulate_panel(const ModelSpec& spec, const Parameters& params, const FixedEffectRule& fe_rule,
                            const RegressorRule& x_rule, int n, std::uint64_t seed, const SimulateOptions& opts) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("simulate_panel: n >= 1 required");
  if (params.beta.size() != spec.K || params.gamma.size() != spec.p)
    throw std::invalid_argument("simulate_panel: parameter sizes do not match spec");

  PanelDataset data;
  data.spec = spec;
  data.individuals.resize(static_cast<std::size_t>(n));

  const int t_obs = spec.t_obs();
  const int burn = opts.stationary_init ? opts.burn_in : 0;

  parallel_for(static_cast<std::size_t>(n), opts.n_threads, [&](std::size_t i) {
    Rng rng(seed, i);
    Individual ind;
    ind.id = std::to_string(i + 1);
    Eigen::MatrixXd x_all = x_rule(rng, burn + t_obs, spec.K);
    ind.x = x_all.bottomRows(t_obs);
    const double alpha = fe_rule(rng, ind.x);
    Eigen::ArrayXi lags = Eigen::ArrayXi::Zero(spec.p);
    if (burn > 0) draw_outcomes(spec, params, x_all.topRows(burn), alpha, lags, rng, nullptr);
    ind.y.resize(t_obs);
    draw_outcomes(spec, params, ind.x, alpha, lags, rng, &ind.y);
    data.individuals[i] = std::move(ind);
  });
  return data;
}

void drop_periods(PanelDataset& data, double share, std::uint64_t seed) {
  if (share < 0.0 || share >= 1.0) throw std::invalid_argument("drop_periods: share in [0,1) required");
  for (std::size_t i = 0; i < data.individuals.size(); ++i) {
    Rng rng(seed ^ 0xd0d0d0d0d0d0d0d0ull, i);
    Individual& ind = data.individuals[i];
    for (int j = 0; j < ind.y.size(); ++j) {
      if (rng.bernoulli(share)) {
        ind.y(j) = -1;
        if (ind.x.cols() > 0) ind.x.row(j).setConstant(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }
}

}  // namespace dplogit
