#pragma once

#include <functional>

#include "extdesign/common.hpp"
#include "extdesign/sampling.hpp"

namespace extdesign {

struct LocalSearchOptions {
  int max_iter = 200;
  /// Stop once the relative decrease of f falls below this.
  double f_tol = 1e-12;
  /// Finite-difference step in unit-cube coordinates.
  double fd_step = 1e-7;
};

struct LocalSearchResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Objective; may return +inf to mark points that must not be visited.
using Objective = std::function<double(const Vector&)>;
using ObjectiveGradient = std::function<Vector(const Vector&)>;

/// Projected quasi-Newton (BFGS) descent over a box, started at x0.
///
/// The search runs in unit-cube coordinates so badly scaled boxes behave. The
/// gradient is taken from `gradient` when given, else from finite differences.
/// The returned point never has a larger objective than x0.
LocalSearchResult minimize_in_box(const Objective& f, const Box& box, const Vector& x0,
                                  const LocalSearchOptions& options = {},
                                  const ObjectiveGradient& gradient = nullptr);

}  // namespace extdesign
