#ifndef DPLOGIT_VERIFY_HPP
#define DPLOGIT_VERIFY_HPP

#include <string>
#include <vector>

#include "dplogit/model.hpp"

namespace dplogit {

// Identity, equivalence, and count suites shared by the CLI `verify`
// command, the unit tests and the acceptance runner.

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured error or measured quantity
  double tolerance = 0.0;  // bound it must satisfy (for counts: expected value)
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const CheckResult& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Lemma/proposition orthogonality and the AR(1) equivalences.
SuiteReport verify_ar1(std::uint64_t seed, int draws = 200);
// AR(2)/AR(3) and restricted-regressor families, dependencies, ranks.
SuiteReport verify_arp(std::uint64_t seed, int draws = 200);
// Measured nullspace dimensions against the count formulas.
SuiteReport verify_counts(std::uint64_t seed);
// Discovery-engine solutions against the closed forms, grid invariance,
// basis conjecture.
SuiteReport verify_discovery(std::uint64_t seed, int points = 20);

std::vector<SuiteReport> verify_all(std::uint64_t seed);

// |sum_y p(y) m(y)| for an arbitrary scalar moment function.
double orthogonality_error(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                           const RegressorPath& x, double alpha,
                           const std::function<double(const OutcomePath&)>& moment);

}  // namespace dplogit

#endif  // DPLOGIT_VERIFY_HPP
