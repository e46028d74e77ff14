#ifndef DPLOGIT_MOMENTS_ARP_HPP
#define DPLOGIT_MOMENTS_ARP_HPP

#include <vector>

#include "dplogit/model.hpp"
#include "dplogit/moments_ar1.hpp"

namespace dplogit {

// Closed-form moment functions for AR(2) and AR(3) models, the AR(2) T=5
// twenty-member family with its four linear dependencies, and the
// restricted-regressor AR(p) families.

enum class P2T4Variant { A, B, C, D };
enum class P3T5Variant { A, B, C, D, E, F, G, H };

// AR(2), T=4, any initial condition; entries written with single-index
// differences plus explicit gamma_1 terms.
double moment_p2_t4(P2T4Variant variant, const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                    const Parameters& params);

// Equivalent closed forms for y0 = (0,0) with the parameters written out.
// Kept as an independent encoding; the two must agree entrywise.
double moment_p2_t4_explicit00(P2T4Variant variant, const OutcomePath& y, const RegressorPath& x,
                               const Parameters& params);

// AR(3), T=5, any initial condition.
double moment_p3_t5(P3T5Variant variant, const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                    const Parameters& params);

// AR(2), T=5: the twenty-member family formed from time-shifted T=4 moments
// and embedded AR(3) moments with gamma_3 = 0.
struct P2T5Tag {
  enum class Group {
    head,      // T=4 moment on periods 1..4
    shifted0,  // 1{y_1=0} times the T=4 moment on periods 2..5
    shifted1,  // 1{y_1=1} times the T=4 moment on periods 2..5
    embedded   // AR(3) T=5 moment with gamma_3 = 0
  };
  Group group = Group::head;
  int variant = 0;  // 0..3 = A..D for the first three groups, 0..7 = A..H for embedded
};

std::vector<P2T5Tag> p2_t5_all_tags();

double moment_p2_t5_family(const P2T5Tag& tag, const InitialCondition& y0, const OutcomePath& y,
                           const RegressorPath& x, const Parameters& params);

// The four linear combinations among the twenty members; all vanish
// identically at every outcome.
Eigen::Vector4d p2_t5_dependency_residuals(const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                                           const Parameters& params);

// AR(2), T=3, no regressors; one moment per initial condition.
double moment_p2_nox_t3(const InitialCondition& y0, const OutcomePath& y, const Eigen::VectorXd& gamma);

// AR(p), p >= 2, T=3, valid when x_2 = x_3; supported initial conditions are
// 0_p, (0,1_{p-1}), (1,0_{p-1}), 1_p.  Only beta, gamma_1 and gamma_p enter.
double moment_arp_t3_xeq(const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                         const Parameters& params, double x_eq_tol = 1e-12);

// AR(p), p >= 3, T=4, valid when x_3 = x_4.
//   A      : time-shifted T=3 moment, y0 = 0_p
//   B      : embedded AR(2) variant-D moment, y0 = 0_p
//   C      : explicit table, y0 = 0_p
//   C_alt  : explicit table, y0 = (0,1,0_{p-2})
enum class PT4Variant { A, B, C, C_alt };
double moment_arp_t4_xeq(PT4Variant variant, const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                         const Parameters& params, double x_eq_tol = 1e-12);

// Identification diagnostics: expected moments on a parameter grid under
// common random numbers, with monotone direction and located root.
enum class ArpTheorem {
  T2i,   // m_{0_p}, grid over gamma_1 (x_2 = x_3 designs)
  T2ii,  // m_{(0,1_{p-1})}, grid over gamma_p
  T4     // m^{(c,p,4)}_{(0,1,0_{p-2})}, p = 3, grid over gamma_2 (x_3 = x_4 designs)
};

struct MonotonicityReport {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  Eigen::VectorXd std_errors;
  bool strictly_monotone = false;
  int direction = 0;  // +1 increasing, -1 decreasing
  bool root_found = false;
  double root_lo = 0.0, root_hi = 0.0;
  double true_value = 0.0;      // true value of the varied parameter
  double value_at_truth = 0.0;  // expected moment at the true parameter vector
  double se_at_truth = 0.0;
  long used = 0;  // draws in the conditioning set
};

MonotonicityReport identification_diag_arp(ArpTheorem theorem, const DgpConfig& dgp, long draws,
                                           const Eigen::VectorXd& grid, std::uint64_t seed, int n_threads = 1);

}  // namespace dplogit

#endif  // DPLOGIT_MOMENTS_ARP_HPP
