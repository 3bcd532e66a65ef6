#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "extdesign/criteria.hpp"
#include "extdesign/design.hpp"
#include "extdesign/lp.hpp"

namespace extdesign {

/// Result of one inner minimization of H(w, .) over the box.
struct InnerResult {
  Probe probe;
  double value = 0.0;
  /// eG: design point maximizing the denominator at the minimizer.
  std::optional<DesignPoint> x;
};

/// Grid + polish minimizer of H(w, .) over a box that keeps its grid between
/// calls: every returned minimizer is appended to the grid.
class InnerMinimizer {
 public:
  InnerMinimizer(const CriterionSpec& spec, const RegressionModel& model, const DesignSpace& space,
                 const ParameterDomain& domain, const SearchOptions& options = {});
  ~InnerMinimizer();
  InnerMinimizer(const InnerMinimizer&) = delete;
  InnerMinimizer& operator=(const InnerMinimizer&) = delete;

  /// w holds weights over the design space.
  InnerResult operator()(const Vector& w);
  /// Appends a probe to the grid.
  void add(const Probe& probe);
  /// Constraint column over the design space; std::nullopt when vacuous.
  std::optional<Vector> column(const Probe& probe) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Single call of the inner minimizer (a fresh grid).
InnerResult inner_argmin(const CriterionSpec& spec, const RegressionModel& model,
                         const DesignSpace& space, const Vector& w, const ParameterDomain& domain,
                         const SearchOptions& options = {});

struct OptimizeOptions {
  /// Stop once t_k - phi(w_k) < eps.
  double eps = 1e-10;
  int max_iter = 500;
  SearchOptions search;
  /// Start weights over the design space; uniform when absent.
  std::optional<Vector> w0;
  /// Linear constraints a^T w <= b on the weights.
  std::vector<WeightConstraint> extra;
  /// Cuts present from the first iteration on.
  std::vector<Probe> initial_cuts;
  LpForm lp_form = LpForm::Primal;
  /// Compute the active set and the equivalence-theorem certificate at the end.
  bool certificate = true;
};

/// One iteration: LP value t_k, phi(w_k) and the gap t_k - phi(w_k).
struct GapRecord {
  int k = 0;
  double t = 0.0;
  double phi = 0.0;
  double delta = 0.0;
};

struct OptimizationReport {
  DesignMeasure design;
  /// Weights over the whole design space.
  Vector weights;
  DesignSpace space;
  /// phi of the returned weights (lower bound on the optimum).
  double value = 0.0;
  /// LP value at the last iteration (upper bound on the optimum).
  double upper_bound = 0.0;
  std::vector<GapRecord> gap_history;
  std::vector<Probe> cuts;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
  bool converged = false;
  int iterations = 0;
  std::optional<ActiveSet> active;
  std::optional<Certificate> certificate;
};

/// Maximizes phi over weights on a finite design space. A finite Theta gives a
/// single LP; a box runs the cutting-plane relaxation.
OptimizationReport optimize(const CriterionSpec& spec, const RegressionModel& model,
                            const DesignSpace& space, const ParameterDomain& domain,
                            const OptimizeOptions& options = {});

/// Successive design-space refinement for one-dimensional designs: after each
/// solve the space is replaced by `points` equally spaced points covering
/// [s (1 - span), s (1 + span)] around every support point s, and span shrinks
/// by `shrink`. Support points closer than `merge` (relative) at the end are
/// merged and the weights re-optimized on the merged support.
struct RefineOptions {
  int rounds = 3;
  int points = 21;
  double span = 0.2;
  double shrink = 0.25;
  double merge = 0.01;
};

OptimizationReport optimize_refined(const CriterionSpec& spec, const RegressionModel& model,
                                    const DesignSpace& space, const ParameterDomain& domain,
                                    const OptimizeOptions& options = {},
                                    const RefineOptions& refine = {});

}  // namespace extdesign
