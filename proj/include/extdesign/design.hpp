#pragma once

#include <functional>
#include <vector>

#include "extdesign/common.hpp"
#include "extdesign/model.hpp"

namespace extdesign {

inline constexpr double kWeightPruneThreshold = 1e-9;
inline constexpr double kPointMergeTolerance = 1e-12;

struct ValidateOptions {
  /// Tolerance on negative weights and on |sum(w) - 1|.
  double tol = 1e-9;
  /// Rescale the weights to unit mass instead of rejecting a bad sum.
  bool renormalize = false;
};

/// Discrete design measure: distinct support points carrying nonnegative weights.
class DesignMeasure {
 public:
  DesignMeasure() = default;

  /// Weights are taken as given: no pruning, merging or normalization. Used for
  /// intermediate weight vectors on a design space and for scaled measures.
  static DesignMeasure unchecked(std::vector<DesignPoint> support, Vector weights);

  std::size_t size() const { return support_.size(); }
  const std::vector<DesignPoint>& support() const { return support_; }
  const Vector& weights() const { return weights_; }
  const DesignPoint& point(std::size_t i) const { return support_[i]; }
  double weight(std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }
  double mass() const { return weights_.sum(); }

  /// Measure with every weight multiplied by a (not a probability measure).
  DesignMeasure scaled(double a) const;
  /// (1 - alpha) this + alpha other, merging coincident support points.
  DesignMeasure mix(const DesignMeasure& other, double alpha) const;

 private:
  std::vector<DesignPoint> support_;
  Vector weights_;
};

/// Merges duplicates, prunes weights below kWeightPruneThreshold and renormalizes.
DesignMeasure validate_design(const std::vector<DesignPoint>& support, const Vector& weights,
                              const ValidateOptions& options = {});

/// Uniform measure on the given points.
DesignMeasure uniform_design(const std::vector<DesignPoint>& support);

/// Measure on a design space from a weight vector over all of its points,
/// dropping the points whose weight falls under the prune threshold.
DesignMeasure design_from_weights(const DesignSpace& space, const Vector& weights);

/// Groups support points chained within `radius` (Euclidean) into one point
/// at their weighted mean carrying their total weight.
DesignMeasure merge_close_points(const DesignMeasure& xi, double radius);

bool same_point(const DesignPoint& a, const DesignPoint& b, double tol = kPointMergeTolerance);

/// sum_i w_i f(x_i)^2.
double l2_norm_sq(const DesignMeasure& xi, const std::function<double(const DesignPoint&)>& f);
/// Same, for values already evaluated on the support.
double l2_norm_sq(const DesignMeasure& xi, const Vector& values);

/// M(xi, theta) = sum_i w_i J(x_i) J(x_i)^T, symmetrized.
Matrix info_matrix(const RegressionModel& model, const DesignMeasure& xi,
                   const ParameterVector& theta);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& m);

}  // namespace extdesign
