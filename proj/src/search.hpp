#pragma once

// Internal machinery shared by the criteria and cutting-plane modules:
// evaluation of constraint columns for probes, cached grid evaluations, and
// the grid + polish minimization of H over a box.

#include <optional>
#include <vector>

#include "extdesign/criteria.hpp"

namespace extdesign::detail {

/// Evaluates h-columns of a criterion on a fixed list of numerator points.
class ProbeEvaluator {
 public:
  /// `den_space` is the eG maximization space; empty means `points`.
  ProbeEvaluator(const RegressionModel& model, const CriterionSpec& spec,
                 std::vector<DesignPoint> points, const DesignSpace& den_space = {});

  std::size_t size() const { return num_idx_.size(); }
  const std::vector<DesignPoint>& points() const { return points_; }
  const RegressionModel& model() const { return model_; }
  const CriterionSpec& spec() const { return spec_; }

  /// Column (h_i)_i over the numerator points; std::nullopt when vacuous.
  std::optional<Vector> column(const Probe& probe) const;
  /// Squared deviations over the numerator points and K + 1/denominator.
  bool deviations(const ParameterVector& theta, const ParameterVector& theta0, Vector& sq,
                  double& factor) const;
  /// H(w, probe) = w^T column.
  std::optional<double> H(const Vector& w, const Probe& probe) const;
  /// Limit of H(w, theta) as theta -> theta0 (eE and ec only).
  LimitValue limit(const Vector& w, const ParameterVector& theta0) const;
  /// eG: the point of the maximization space with the largest squared deviation.
  DesignPoint argmax_x(const Probe& probe) const;

 private:
  const RegressionModel& model_;
  CriterionSpec spec_;
  std::vector<DesignPoint> points_;
  std::vector<DesignPoint> all_;        // union of numerator points and den_space
  std::vector<std::size_t> num_idx_;    // numerator points inside all_
  std::vector<std::size_t> den_idx_;    // eG maximization points inside all_
  // Responses and jacobians at the fixed anchor (non worst-case specs).
  std::optional<ParameterVector> anchor_;
  Vector anchor_eta_;                   // over all_
  Matrix anchor_jac_;                   // p x size()
  Vector anchor_c_;
};

/// Grid probes with cached squared deviations, plus probes appended later.
class GridCache {
 public:
  GridCache(const ProbeEvaluator& evaluator, std::vector<Probe> probes, double exclusion);

  /// H(w, .) at every cached probe; +inf where excluded or vacuous.
  Vector values(const Vector& w) const;
  const Probe& probe(std::size_t i) const;
  std::size_t size() const;
  void append(const Probe& probe);

 private:
  void add_row(const Probe& probe, Matrix& sq, Vector& factor, std::size_t row);

  const ProbeEvaluator& ev_;
  double exclusion_;
  std::vector<Probe> probes_;
  Matrix sq_;       // probes x points
  Vector factor_;   // +inf marks excluded / vacuous
  std::vector<Probe> extra_probes_;
  std::vector<Vector> extra_sq_;
  std::vector<double> extra_factor_;
};

struct SearchHit {
  Probe probe;
  double value = 0.0;
};

/// Grid probes over a box: (theta_g, theta0) pairs, or (theta_g, theta0_g) from
/// two independent samples for worst-case criteria.
std::vector<Probe> box_probes(const CriterionSpec& spec, const Box& box, const GridSpec& grid);

/// Probes over a finite set: (theta_j, theta0), or every ordered pair.
std::vector<Probe> finite_probes(const CriterionSpec& spec, const FiniteSet& set);

/// Grid argmin over the cache, local polish from the `starts` best grid points
/// and, for eE/ec, the theta -> theta0 limit. Returns every candidate, best first.
std::vector<SearchHit> search_box(const ProbeEvaluator& ev, const Vector& w,
                                  const GridCache& cache, const Box& box, double exclusion,
                                  int starts, const LocalSearchOptions& polish,
                                  const std::vector<Probe>& seeds = {});

/// Local polish of one probe inside the box (pairs are polished jointly).
SearchHit polish_probe(const ProbeEvaluator& ev, const Vector& w, const Probe& start,
                       const Box& box, double exclusion, const LocalSearchOptions& polish);

/// H over a probe that may be excluded: +inf inside the exclusion ball or when vacuous.
double guarded_H(const ProbeEvaluator& ev, const Vector& w, const Probe& probe, double exclusion);

}  // namespace extdesign::detail
