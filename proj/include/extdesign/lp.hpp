#pragma once

#include <string>
#include <vector>

#include "extdesign/common.hpp"

namespace extdesign {

enum class LpStatus { Optimal, Unbounded, Infeasible, IterationLimit };
enum class RowSense { LessEqual, GreaterEqual, Equal };

const char* to_string(LpStatus status);

/// maximize c^T x  subject to  A x (sense) b,  x >= 0 except free variables.
struct LinearProgram {
  Matrix a;
  Vector b;
  Vector c;
  std::vector<RowSense> sense;
  /// Empty means no free variables.
  std::vector<bool> free_vars;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  int max_iterations = 200000;
  int refactor_every = 100;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  /// Row multipliers: objective = b^T duals; >= 0 on <= rows, <= 0 on >= rows.
  Vector duals;
  int iterations = 0;
  bool used_bland = false;
};

/// Two-phase revised simplex with an explicit basis inverse, Dantzig pricing
/// with lowest-index tie-breaking, and Bland's rule once too many consecutive
/// degenerate pivots have occurred.
LpResult solve_lp(const LinearProgram& lp, const LpOptions& options = {});

/// Plain-text dump of an LP instance, for debugging.
std::string to_text(const LinearProgram& lp);

/// Linear constraint coeffs^T w <= bound on the design weights.
struct WeightConstraint {
  Vector coeffs;
  double bound = 0.0;
};

/// max_{w in simplex, t} t  subject to  sum_i w_i h(i, j) >= t for every column j.
struct MaximinLP {
  /// Rows are design points, columns are constraint parameters.
  Matrix h;
  std::vector<WeightConstraint> extra;
};

enum class LpForm { Auto, Primal, Dual };

struct MaximinSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector w;
  double t = 0.0;
  /// Optimal mixing measure over the columns (LP duals of the column constraints).
  Vector mu;
};

/// Solves the maximin weight LP. The Dual form works with a basis of size
/// rows(h)+1 and is only available without extra constraints.
MaximinSolution solve_maximin(const MaximinLP& lp, LpForm form = LpForm::Auto,
                              const LpOptions& options = {});

struct MinmaxSolution {
  Vector mu;
  double value = 0.0;
};

/// min over probability vectors mu of max_i (psi mu)_i.
MinmaxSolution solve_minmax_measure(const Matrix& psi, const LpOptions& options = {});

}  // namespace extdesign
