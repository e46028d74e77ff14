#include "dplogit/discovery.hpp"

#include <Eigen/SVD>

#include "dplogit/common.hpp"
#include "dplogit/moments_ar1.hpp"

namespace dplogit {

AlphaGrid AlphaGrid::standard(int T) {
  // 2^T points spread over the range where the logistic factors actually
  // vary, plus two near-corner values.  Integer grids q = 1..2^T are valid in
  // exact arithmetic but saturate numerically beyond alpha of about 9: the
  // rows for large alpha collapse onto the all-ones corner and the measured
  // rank drops below the true span dimension.
  const int n = 1 << T;
  AlphaGrid grid;
  grid.values.resize(n + 2);
  grid.values(0) = -30.0;
  for (int q = 0; q < n; ++q) grid.values(q + 1) = -9.0 + 18.0 * q / (n - 1.0);
  grid.values(n + 1) = 30.0;
  return grid;
}

void AlphaGrid::validate(int T) const {
  if (values.size() < (1 << T)) throw std::invalid_argument("AlphaGrid: need Q >= 2^T");
  for (int i = 0; i + 1 < values.size(); ++i)
    if (!(values(i) < values(i + 1))) throw std::invalid_argument("AlphaGrid: values must be strictly increasing");
}

ProbabilityMatrix build_probability_matrix(const ModelSpec& spec, const Parameters& params,
                                           const InitialCondition& y0, const RegressorPath& x,
                                           const AlphaGrid& grid) {
  spec.validate();
  grid.validate(spec.T);
  ProbabilityMatrix pm;
  pm.grid = grid;
  const int q = static_cast<int>(grid.values.size());
  pm.L.resize(q, spec.n_outcomes());
  for (int row = 0; row < q; ++row)
    pm.L.row(row) = probability_vector(spec, params, y0, x, grid.values(row)).probs.transpose();
  return pm;
}

NullspaceBasis nullspace_basis(const ProbabilityMatrix& pm, const TolPolicy& policy) {
  Eigen::MatrixXd L = pm.L;
  if (policy.normalize_rows) {
    for (int r = 0; r < L.rows(); ++r) {
      const double m = L.row(r).cwiseAbs().maxCoeff();
      if (m > 0.0) L.row(r) /= m;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int n = static_cast<int>(L.cols());
  NullspaceBasis basis;
  basis.singular_values = sv;
  basis.tolerance = policy.relative_cut * sv(0);

  int null_count = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < basis.tolerance) ++null_count;
  // rows >= cols here by construction (Q >= 2^T), so sv has n entries
  const int rank = n - null_count;
  if (null_count > 0 && rank > 0) {
    const double above = sv(rank - 1);
    const double below = sv(rank);
    if (below > 0.0 && above / below < policy.min_gap_ratio) basis.ambiguous = true;
  }
  basis.vectors = svd.matrixV().rightCols(null_count);
  return basis;
}

int nullspace_dimension(const ProbabilityMatrix& pm, const TolPolicy& policy) {
  const NullspaceBasis basis = nullspace_basis(pm, policy);
  if (basis.ambiguous) throw std::runtime_error("nullspace_dimension: ambiguous singular spectrum");
  return basis.dimension();
}

LinearConstraint unit_constraint(int dim, int index, double rhs) {
  LinearConstraint c;
  c.row = Eigen::VectorXd::Zero(dim);
  c.row(index) = 1.0;
  c.rhs = rhs;
  return c;
}

Eigen::VectorXd solve_constrained_moment(const ProbabilityMatrix& pm, const std::vector<LinearConstraint>& constraints,
                                         const std::vector<int>& row_selection) {
  const int n = static_cast<int>(pm.L.cols());
  const int nc = static_cast<int>(constraints.size());
  const int from_l = n - nc;
  if (from_l < 0) throw std::invalid_argument("solve_constrained_moment: too many constraints");
  std::vector<int> rows = row_selection;
  if (rows.empty())
    for (int i = 0; i < from_l; ++i) rows.push_back(i);
  if (static_cast<int>(rows.size()) != from_l)
    throw std::invalid_argument("solve_constrained_moment: row selection must make the system square");

  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < nc; ++i) {
    if (constraints[i].row.size() != n) throw std::invalid_argument("solve_constrained_moment: bad constraint size");
    a.row(i) = constraints[i].row.transpose();
    b(i) = constraints[i].rhs;
  }
  for (int i = 0; i < from_l; ++i) a.row(nc + i) = pm.L.row(rows[i]);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double det = std::abs(lu.determinant());
  if (!(det > 0.0) || !std::isfinite(det)) throw std::runtime_error("solve_constrained_moment: singular system");
  Eigen::VectorXd m = lu.solve(b);
  // one step of iterative refinement; the stacked matrix mixes unit rows with
  // probability rows of very different scale
  m += lu.solve(b - a * m);
  return m;
}

int matrix_rank(const Eigen::MatrixXd& m, double relative_cut) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= relative_cut * sv(0)) ++rank;
  return rank;
}

BasisConjectureReport basis_conjecture_check(int T, int y0, const RegressorPath& x, const Parameters& params,
                                             std::uint64_t seed) {
  if (T < 3) throw std::invalid_argument("basis_conjecture_check: T >= 3 required");
  if (params.gamma(0) == 0.0) throw std::invalid_argument("basis_conjecture_check: gamma must be nonzero");
  const int n = 1 << T;

  // candidate vectors w(y_1..y_{t-1}) * m^{(a/b)(t,s,T)} with indicator weights
  std::vector<Eigen::VectorXd> candidates;
  for (int t = 1; t <= T - 2; ++t) {
    for (int s = t + 1; s <= T - 1; ++s) {
      const int prefixes = 1 << (t - 1);
      for (int prefix = 0; prefix < prefixes; ++prefix) {
        for (int v = 0; v < 2; ++v) {
          MomentFamilyAR1 fam;
          fam.variant = v == 0 ? Ar1Variant::A : Ar1Variant::B;
          fam.t = t;
          fam.s = s;
          fam.r = T;
          fam.y0 = y0;
          fam.prehistory_weight = [prefix, t](const Eigen::ArrayXi& pre) {
            int idx = 0;
            for (int i = 0; i < t - 1; ++i) idx = (idx << 1) | pre(i);
            return idx == prefix ? 1.0 : 0.0;
          };
          candidates.push_back(moment_value_table(
              T, [&](const OutcomePath& y) { return moment_ar1_general(fam, y, x, params); }));
        }
      }
    }
  }

  BasisConjectureReport rep;
  rep.candidate_count = static_cast<int>(candidates.size());
  Eigen::MatrixXd c(n, rep.candidate_count);
  for (int j = 0; j < rep.candidate_count; ++j) c.col(j) = candidates[j];
  rep.span_dimension = matrix_rank(c);

  ModelSpec spec;
  spec.p = 1;
  spec.T = T;
  spec.K = static_cast<int>(x.cols());
  InitialCondition init(1);
  init(0) = y0;
  const ProbabilityMatrix pm = build_probability_matrix(spec, params, init, x, AlphaGrid::standard(T));
  const NullspaceBasis basis = nullspace_basis(pm);
  rep.nullspace_dimension = basis.dimension();

  const int expected = n - 2 * T;
  rep.dimension_match = rep.span_dimension == expected && rep.nullspace_dimension == expected;

  // uniqueness: the candidate matrix has full column rank exactly when the
  // coefficients in the expansion are unique; also reconstruct a random
  // nullspace element through least squares as a direct check
  if (rep.dimension_match && rep.candidate_count == expected) {
    Rng rng(seed ^ 0xbadc0ffeeull);
    Eigen::VectorXd coef(rep.nullspace_dimension);
    for (int i = 0; i < coef.size(); ++i) coef(i) = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd target = basis.vectors * coef;
    const Eigen::VectorXd sol = c.colPivHouseholderQr().solve(target);
    rep.reconstruction_error = (c * sol - target).cwiseAbs().maxCoeff();
    rep.coefficient_uniqueness = matrix_rank(c) == rep.candidate_count && rep.reconstruction_error < 1e-8;
  }
  return rep;
}

NullspaceBasis discover_special_case(const ModelSpec& spec, const Parameters& params, const InitialCondition& y0,
                                     const RegressorPath& x, const AlphaGrid& grid, const TolPolicy& policy) {
  return nullspace_basis(build_probability_matrix(spec, params, y0, x, grid), policy);
}

}  // namespace dplogit
