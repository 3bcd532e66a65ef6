#pragma once

#include <cstdint>
#include <vector>

#include "extdesign/design.hpp"
#include "extdesign/local_search.hpp"
#include "extdesign/model.hpp"
#include "extdesign/sampling.hpp"

namespace extdesign {

/// Observations y_i at design points x_i (replications allowed).
struct ObservationSet {
  std::vector<DesignPoint> x;
  Vector y;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return x.size(); }
  /// Throws DesignError on length mismatch or negative sigma.
  void validate() const;
};

/// Exact design of n points from a measure: floor(n w_i) replications, the
/// remainder going to the largest fractional parts (ties to lower index).
std::vector<DesignPoint> replicate_design(const DesignMeasure& xi, int n);

/// y_i = eta(x_i, theta) + sigma z_i with seeded standard normal z_i.
ObservationSet simulate_observations(const RegressionModel& model,
                                     const std::vector<DesignPoint>& x,
                                     const ParameterVector& theta, double sigma,
                                     std::uint64_t seed);

/// Residual sum of squares ||y - eta_X(theta)||^2.
double residual_ss(const RegressionModel& model, const ObservationSet& obs,
                   const ParameterVector& theta);

struct LocalMinimum {
  ParameterVector theta;
  double residual = 0.0;  // ||y - eta_X(theta)||
  int hits = 0;           // starts that converged here
};

struct FitResult {
  ParameterVector theta;
  double residual = 0.0;
  /// Distinct local minima, by increasing residual.
  std::vector<LocalMinimum> local_minima;
  /// theta attains the smallest residual found (always true for a non-empty fit).
  bool global = false;
};

struct FitOptions {
  int starts = 50;
  std::uint64_t seed = 20131001;
  /// Converged points closer than this times diam(Theta) are merged.
  double cluster_radius = 1e-4;
  LocalSearchOptions local;
};

/// Least squares over a box by local descent from Latin hypercube starts.
FitResult ls_fit_multistart(const RegressionModel& model, const ObservationSet& obs,
                            const Box& box, const FitOptions& options = {});

/// Radius 2 ||y - eta_X(theta)|| / (sqrt(N) sqrt(phi_eE)) of the ball around
/// theta that contains the least-squares estimator; +inf when phi_eE = 0.
double localization_radius(const RegressionModel& model, const ObservationSet& obs,
                           const ParameterVector& theta, double phi_eE);

}  // namespace extdesign
