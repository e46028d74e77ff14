#ifndef DPLOGIT_DISCOVERY_HPP
#define DPLOGIT_DISCOVERY_HPP

#include <vector>

#include "dplogit/model.hpp"

namespace dplogit {

// Functional-differencing engine: stacks model probability vectors over a
// grid of fixed-effect values and reads valid moment vectors off the
// nullspace of the resulting matrix.

struct AlphaGrid {
  Eigen::VectorXd values;  // strictly increasing, length Q >= 2^T

  // alpha_q = q for q = 1..2^T, augmented with -10 and +10.
  static AlphaGrid standard(int T);
  void validate(int T) const;
};

struct ProbabilityMatrix {
  Eigen::MatrixXd L;  // Q x 2^T, row q = probability vector at alpha_q
  AlphaGrid grid;
};

ProbabilityMatrix build_probability_matrix(const ModelSpec& spec, const Parameters& params,
                                           const InitialCondition& y0, const RegressorPath& x,
                                           const AlphaGrid& grid);

struct TolPolicy {
  double relative_cut = 1e-9;    // singular values below cut * sigma_max count as null
  double min_gap_ratio = 1e3;    // spectral gap demanded across the cut
  bool normalize_rows = true;    // scale rows to unit maximum before the SVD
};

struct NullspaceBasis {
  Eigen::MatrixXd vectors;          // 2^T x dim, orthonormal columns
  Eigen::VectorXd singular_values;  // full spectrum, descending
  double tolerance = 0.0;           // absolute threshold used
  bool ambiguous = false;           // borderline spectrum (gap ratio below policy)

  int dimension() const { return static_cast<int>(vectors.cols()); }
};

NullspaceBasis nullspace_basis(const ProbabilityMatrix& pm, const TolPolicy& policy = {});

// Count of singular values below the threshold.  Throws if the spectrum is
// ambiguous under the policy.
int nullspace_dimension(const ProbabilityMatrix& pm, const TolPolicy& policy = {});

// Solves for the unique moment vector satisfying the given affine constraints
// together with orthogonality to grid rows of L.  The stacked system must be
// square: constraints.size() + rows used from L = 2^T, taking the first rows
// of L unless row_selection is given.
struct LinearConstraint {
  Eigen::VectorXd row;
  double rhs = 0.0;
};

Eigen::VectorXd solve_constrained_moment(const ProbabilityMatrix& pm, const std::vector<LinearConstraint>& constraints,
                                         const std::vector<int>& row_selection = {});

// Convenience constraint rows.
LinearConstraint unit_constraint(int dim, int index, double rhs);

struct BasisConjectureReport {
  int candidate_count = 0;   // basis functions with r = T and indicator weights
  int span_dimension = 0;    // rank of the stacked candidates
  int nullspace_dimension = 0;
  bool dimension_match = false;        // span == nullspace == 2^T - 2T
  bool coefficient_uniqueness = false; // candidates have full column rank and
                                       // reproduce a random nullspace element
  double reconstruction_error = 0.0;
};

// Checks that the r = T moment functions with prefix-indicator weights span
// the full space of valid moment vectors with unique coefficients (p=1).
BasisConjectureReport basis_conjecture_check(int T, int y0, const RegressorPath& x, const Parameters& params,
                                             std::uint64_t seed = 0);

// Nullspace for special parameter or regressor values (possibly enlarged
// relative to the generic count).
NullspaceBasis discover_special_case(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                                     const RegressorPath& x, const AlphaGrid& grid, const TolPolicy& policy = {});

// Numerical rank with the same relative-cut convention.
int matrix_rank(const Eigen::MatrixXd& m, double relative_cut = 1e-9);

}  // namespace dplogit

#endif  // DPLOGIT_DISCOVERY_HPP
