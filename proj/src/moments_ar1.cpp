#include "dplogit/moments_ar1.hpp"

#include <cmath>

namespace dplogit {

namespace {

inline double xdiff_beta(const RegressorPath& x, const Parameters& params, int t, int s) {
  if (x.cols() == 0) return 0.0;
  return (x.row(t - 1) - x.row(s - 1)).dot(params.beta);
}

ModelSpec ar1_spec(const RegressorPath& x, int T) {
  ModelSpec spec;
  spec.p = 1;
  spec.T = T;
  spec.K = static_cast<int>(x.cols());
  return spec;
}

InitialCondition scalar_init(int y0) {
  InitialCondition v(1);
  v(0) = y0;
  return v;
}

}  // namespace

double moment_ar1_t3(Ar1Variant variant, int y0, const OutcomePath& y, const RegressorPath& x,
                     const Parameters& params) {
  if (y.size() != 3) throw std::invalid_argument("moment_ar1_t3: T=3 outcome required");
  const double gamma = params.gamma(0);
  const int y1 = y(0), y2 = y(1), y3 = y(2);
  if (variant == Ar1Variant::A) {
    if (y0 == 0) {
      if (y1 == 0 && y2 == 1 && y3 == 0) return std::exp(xdiff_beta(x, params, 1, 2));
      if (y1 == 0 && y2 == 1 && y3 == 1) return std::exp(xdiff_beta(x, params, 1, 3) - gamma);
      if (y1 == 1 && y2 == 0) return -1.0;
      if (y1 == 1 && y2 == 1 && y3 == 0) return std::exp(xdiff_beta(x, params, 3, 2)) - 1.0;
      return 0.0;
    }
    if (y1 == 0 && y2 == 1 && y3 == 0) return std::exp(xdiff_beta(x, params, 1, 2) + gamma);
    if (y1 == 0 && y2 == 1 && y3 == 1) return std::exp(xdiff_beta(x, params, 1, 3));
    if (y1 == 1 && y2 == 0) return -1.0;
    if (y1 == 1 && y2 == 1 && y3 == 0) return std::exp(xdiff_beta(x, params, 3, 2)) - 1.0;
    return 0.0;
  }
  if (y0 == 0) {
    if (y1 == 0 && y2 == 0 && y3 == 1) return std::exp(xdiff_beta(x, params, 2, 3)) - 1.0;
    if (y1 == 0 && y2 == 1) return -1.0;
    if (y1 == 1 && y2 == 0 && y3 == 0) return std::exp(xdiff_beta(x, params, 3, 1));
    if (y1 == 1 && y2 == 0 && y3 == 1) return std::exp(gamma + xdiff_beta(x, params, 2, 1));
    return 0.0;
  }
  if (y1 == 0 && y2 == 0 && y3 == 1) return std::exp(xdiff_beta(x, params, 2, 3)) - 1.0;
  if (y1 == 0 && y2 == 1) return -1.0;
  if (y1 == 1 && y2 == 0 && y3 == 0) return std::exp(xdiff_beta(x, params, 3, 1) - gamma);
  if (y1 == 1 && y2 == 0 && y3 == 1) return std::exp(xdiff_beta(x, params, 2, 1));
  return 0.0;
}

double moment_ar1_general(const MomentFamilyAR1& family, const OutcomePath& y, const RegressorPath& x,
                          const Parameters& params) {
  const int T = static_cast<int>(y.size());
  const int t = family.t, s = family.s, r = family.r;
  if (!(1 <= t && t < s && s < r && r <= T)) throw std::invalid_argument("moment_ar1_general: invalid triple");
  const ModelSpec spec = ar1_spec(x, T);
  const InitialCondition y0 = scalar_init(family.y0);
  const auto z = [&](int a, int b) { return single_index_diff(spec, params, y0, y, x, a, b); };

  double value = 0.0;
  const int yt = y(t - 1), ys = y(s - 1), yr = y(r - 1);
  if (family.variant == Ar1Variant::A) {
    if (yt == 0 && ys == 1 && yr == 0) value = std::exp(z(t, s));
    else if (yt == 0 && ys == 1 && yr == 1) value = std::exp(z(t, r));
    else if (yt == 1 && ys == 0) value = -1.0;
    else if (yt == 1 && ys == 1 && yr == 0) value = std::exp(z(r, s)) - 1.0;
  } else {
    if (yt == 0 && ys == 0 && yr == 1) value = std::exp(z(s, r)) - 1.0;
    else if (yt == 0 && ys == 1) value = -1.0;
    else if (yt == 1 && ys == 0 && yr == 0) value = std::exp(z(r, t));
    else if (yt == 1 && ys == 0 && yr == 1) value = std::exp(z(s, t));
  }
  if (family.prehistory_weight && t > 1) value *= family.prehistory_weight(y.head(t - 1));
  else if (family.prehistory_weight) value *= family.prehistory_weight(Eigen::ArrayXi());
  return value;
}

double moment_ar1_rescaled(Ar1Variant variant, int y0, const OutcomePath& y, const RegressorPath& x,
                           const Parameters& params) {
  const double m = moment_ar1_t3(variant, y0, y, x, params);
  const double gamma = params.gamma(0);
  double den;
  if (variant == Ar1Variant::A) {
    if (y0 == 0)
      den = 1.0 + std::exp(xdiff_beta(x, params, 1, 2)) + std::exp(xdiff_beta(x, params, 1, 3) - gamma) +
            std::exp(xdiff_beta(x, params, 3, 2));
    else
      den = 1.0 + std::exp(xdiff_beta(x, params, 1, 2) + gamma) + std::exp(xdiff_beta(x, params, 1, 3)) +
            std::exp(xdiff_beta(x, params, 3, 2));
  } else {
    if (y0 == 0)
      den = 1.0 + std::exp(xdiff_beta(x, params, 2, 3)) + std::exp(xdiff_beta(x, params, 3, 1)) +
            std::exp(gamma + xdiff_beta(x, params, 2, 1));
    else
      den = 1.0 + std::exp(xdiff_beta(x, params, 2, 3)) + std::exp(xdiff_beta(x, params, 3, 1) - gamma) +
            std::exp(xdiff_beta(x, params, 2, 1));
  }
  return m / den;
}

double ar1_rescale_denominator(Ar1Variant variant, int t, int s, int r, int y_tm1, const RegressorPath& x,
                               const Parameters& params) {
  const double gamma = params.gamma(0);
  const double w = static_cast<double>(y_tm1);
  // Gamma contribution of a lag entering a z-difference with the given sign.
  // Lags pinned by the support row are exact; free interior lags are bounded
  // by their worst case so the denominator dominates every realized value.
  const auto lag_term = [gamma](bool pinned, int pin_value, int sign) {
    if (pinned) return sign * pin_value * gamma;
    return std::max(0.0, sign * gamma);
  };
  const bool s_adj = (s - 1 == t);  // y_{s-1} coincides with y_t
  const bool r_adj = (r - 1 == s);  // y_{r-1} coincides with y_s
  double den = 1.0;
  if (variant == Ar1Variant::A) {
    // row (0,1,0): z_ts = x_ts'b + (w - y_{s-1}) g, y_t = 0
    den += std::exp(xdiff_beta(x, params, t, s) + w * gamma + lag_term(s_adj, 0, -1));
    // row (0,1,1): z_tr = x_tr'b + (w - y_{r-1}) g, y_s = 1
    den += std::exp(xdiff_beta(x, params, t, r) + w * gamma + lag_term(r_adj, 1, -1));
    // row (1,1,0): z_rs = x_rs'b + (y_{r-1} - y_{s-1}) g, y_t = 1, y_s = 1
    den += std::exp(xdiff_beta(x, params, r, s) + lag_term(r_adj, 1, +1) + lag_term(s_adj, 1, -1));
  } else {
    // row (0,0,1): z_sr = x_sr'b + (y_{s-1} - y_{r-1}) g, y_t = 0, y_s = 0
    den += std::exp(xdiff_beta(x, params, s, r) + lag_term(s_adj, 0, +1) + lag_term(r_adj, 0, -1));
    // row (1,0,0): z_rt = x_rt'b + (y_{r-1} - w) g, y_s = 0
    den += std::exp(xdiff_beta(x, params, r, t) + lag_term(r_adj, 0, +1) - w * gamma);
    // row (1,0,1): z_st = x_st'b + (y_{s-1} - w) g, y_t = 1
    den += std::exp(xdiff_beta(x, params, s, t) + lag_term(s_adj, 1, +1) - w * gamma);
  }
  return den;
}

std::pair<double, double> kitazawa_moments(int t, int y0, const OutcomePath& y, const RegressorPath& x,
                                           const Parameters& params) {
  const int T = static_cast<int>(y.size());
  if (t < 2 || t > T - 1) throw std::out_of_range("kitazawa_moments: need 2 <= t <= T-1");
  const ModelSpec spec = ar1_spec(x, T);
  const InitialCondition init = scalar_init(y0);
  const double gamma = params.gamma(0);
  const double delta = std::exp(gamma) - 1.0;

  const auto dx_beta = [&](int a) {  // (x_a - x_{a-1})' beta
    return xdiff_beta(x, params, a, a - 1);
  };
  const double yt = y(t - 1);
  const double ytp1 = y(t);
  const double ytm1 = lagged_outcome(spec, init, y, t - 1);
  const double ytm2 = lagged_outcome(spec, init, y, t - 2);
  const double dsum = dx_beta(t) + dx_beta(t + 1);

  const double u = yt + (1.0 - yt) * ytp1 - (1.0 - yt) * ytp1 * std::exp(-dx_beta(t + 1)) -
                   delta * ytm1 * (1.0 - yt) * ytp1 * std::exp(-dx_beta(t + 1));
  const double hbar_u = u - ytm1 - std::tanh((-gamma * ytm2 + dsum) / 2.0) * (u + ytm1 - 2.0 * u * ytm1);

  const double ups = yt * ytp1 + yt * (1.0 - ytp1) * std::exp(dx_beta(t + 1)) +
                     delta * (1.0 - ytm1) * yt * (1.0 - ytp1) * std::exp(dx_beta(t + 1));
  const double hbar_ups =
      ups - ytm1 - std::tanh((gamma * (1.0 - ytm2) + dsum) / 2.0) * (ups + ytm1 - 2.0 * ups * ytm1);

  return {hbar_u, hbar_ups};
}

double hk_combination(HkCombination which, int y0, const OutcomePath& y, double x12_beta, const Parameters& params) {
  const double gamma = params.gamma(0);
  // The combination divides by e^{-gamma}-1 or e^{gamma}-1.
  if (gamma == 0.0) throw std::domain_error("hk_combination: singular at gamma = 0");
  // Reconstruct a regressor path consistent with x_2 = x_3 and the given x_12'beta.
  Parameters par = params;
  par.beta = Eigen::VectorXd::Ones(1);
  RegressorPath x = RegressorPath::Zero(3, 1);
  x(0, 0) = x12_beta;
  const double ma = moment_ar1_t3(Ar1Variant::A, y0, y, x, par);
  const double mb = moment_ar1_t3(Ar1Variant::B, y0, y, x, par);
  if (which == HkCombination::survivor_y3_0) {
    const double coef = (y0 == 0) ? std::exp(x12_beta - gamma) : std::exp(x12_beta);
    return (ma + coef * mb) / (std::exp(-gamma) - 1.0);
  }
  const double coef = (y0 == 0) ? std::exp(x12_beta) : std::exp(x12_beta + gamma);
  return (ma + coef * mb) / (std::exp(gamma) - 1.0);
}

std::pair<double, double> tau_curves(const Eigen::VectorXd& prob_table, double theta) {
  if (prob_table.size() != 8) throw std::invalid_argument("tau_curves: 8 conditional probabilities required");
  if (theta <= 0.0) throw std::domain_error("tau_curves: theta must be positive");
  if (prob_table.minCoeff() < 0.0) throw std::invalid_argument("tau_curves: negative probability");
  // canonical order: index = 4*y1 + 2*y2 + y3
  const double p001 = prob_table(1);
  const double p010 = prob_table(2);
  const double p011 = prob_table(3);
  const double p100 = prob_table(4);
  const double p101 = prob_table(5);
  const double p110 = prob_table(6);

  const double den_a = -p010 + theta * (p100 + p101) - (theta * theta - theta) * p110;
  if (den_a <= 0.0) throw std::domain_error("tau_curves: theta outside admissible range");
  const double tau_a = p011 / den_a;
  const double tau_b = (-(1.0 / theta - 1.0) * p001 + (p010 + p011) - theta * theta * p100) / p101;
  return {tau_a, tau_b};
}

std::pair<double, double> dependency_identity_t4(int y0, const OutcomePath& y, const RegressorPath& x,
                                                 const Parameters& params) {
  if (y.size() != 4) throw std::invalid_argument("dependency_identity_t4: T=4 outcome required");
  const double gamma = params.gamma(0);
  if (gamma == 0.0) throw std::domain_error("dependency_identity_t4: gamma must be nonzero");

  const auto mom = [&](Ar1Variant v, int t, int s, int r) {
    MomentFamilyAR1 fam;
    fam.variant = v;
    fam.t = t;
    fam.s = s;
    fam.r = r;
    fam.y0 = y0;
    return moment_ar1_general(fam, y, x, params);
  };
  const auto xb = [&](int t, int s) { return xdiff_beta(x, params, t, s); };

  const double lhs = (std::exp(gamma) - 1.0) * mom(Ar1Variant::A, 1, 2, 3);
  double rhs = (1.0 + std::exp(gamma) - std::exp(xb(4, 3)) - std::exp(gamma + xb(3, 4))) * mom(Ar1Variant::A, 1, 2, 4);
  rhs += (std::exp(gamma + xb(3, 4)) - 1.0) * mom(Ar1Variant::A, 1, 3, 4);
  rhs += std::exp(y0 * gamma) * (std::exp(xb(1, 4)) - std::exp(xb(1, 3))) * mom(Ar1Variant::B, 1, 3, 4);
  const double pref = std::exp((1.0 - y(0)) * (y0 * gamma + xb(1, 4)));
  rhs += pref * ((std::exp(xb(4, 2)) - std::exp(xb(3, 2))) * mom(Ar1Variant::A, 2, 3, 4) +
                 (std::exp(xb(4, 3)) - 1.0) * mom(Ar1Variant::B, 2, 3, 4));
  return {lhs, rhs};
}

bool in_x_k_plus(const RegressorPath& x, int k) {
  const double a = x(0, k), b = x(1, k), c = x(2, k);
  return (a <= c && c < b) || (a < c && c <= b);
}

bool in_x_k_minus(const RegressorPath& x, int k) {
  const double a = x(0, k), b = x(1, k), c = x(2, k);
  return (a >= c && c > b) || (a > c && c >= b);
}

std::function<bool(const RegressorPath&)> x_set_predicate(const std::vector<int>& signs) {
  return [signs](const RegressorPath& x) {
    for (std::size_t k = 0; k < signs.size(); ++k) {
      if (signs[k] > 0) {
        if (!in_x_k_plus(x, static_cast<int>(k))) return false;
      } else {
        if (!in_x_k_minus(x, static_cast<int>(k))) return false;
      }
    }
    return true;
  };
}

MomentMeanEstimate expected_moment_on_set(const MomentFamilyAR1& family, const Parameters& params_eval,
                                          const DgpConfig& dgp, const std::function<bool(const RegressorPath&)>& set,
                                          long draws, std::uint64_t seed, int n_threads) {
  if (draws < 1) throw std::invalid_argument("expected_moment_on_set: draws >= 1 required");
  PanelDataset data = simulate_panel(dgp.spec, dgp.params, dgp.fe_rule, dgp.x_rule, static_cast<int>(draws), seed,
                                     {.n_threads = n_threads});
  double sum = 0.0, sumsq = 0.0;
  long used = 0;
  for (const Individual& ind : data.individuals) {
    const InitialCondition y0 = data.initial_condition(ind);
    if (y0(0) != family.y0) continue;
    const RegressorPath x = data.regressors(ind);
    if (!set(x)) continue;
    const double m = moment_ar1_general(family, data.outcomes(ind), x, params_eval);
    sum += m;
    sumsq += m * m;
    ++used;
  }
  if (used == 0) throw std::runtime_error("expected_moment_on_set: no draws landed in the conditioning set");
  MomentMeanEstimate est;
  est.estimate = sum / used;
  est.std_error = used > 1 ? std::sqrt((sumsq / used - est.estimate * est.estimate) / (used - 1)) : 0.0;
  est.used = used;
  est.total = draws;
  return est;
}

Eigen::VectorXd moment_value_table(int T, const std::function<double(const OutcomePath&)>& fn) {
  Eigen::VectorXd table(1 << T);
  for (int idx = 0; idx < (1 << T); ++idx) table(idx) = fn(outcome_from_index(T, idx));
  return table;
}

}  // namespace dplogit
