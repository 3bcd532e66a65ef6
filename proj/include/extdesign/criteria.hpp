#pragma once

#include <optional>
#include <string>
#include <vector>

#include "extdesign/common.hpp"
#include "extdesign/design.hpp"
#include "extdesign/functional.hpp"
#include "extdesign/local_search.hpp"
#include "extdesign/model.hpp"
#include "extdesign/sampling.hpp"

namespace extdesign {

/// Extended criteria (eE, ec, eG) and their classical counterparts.
enum class CriterionKind { eE, ec, eG, E, c, G, D };

const char* to_string(CriterionKind kind);
CriterionKind parse_criterion_kind(const std::string& name);
bool is_extended(CriterionKind kind);

struct CriterionSpec {
  CriterionKind kind = CriterionKind::eE;
  /// Anchor parameter; absent for worst-case criteria.
  std::optional<ParameterVector> theta0;
  /// Saturation constant: the ratio's 1/denominator becomes K + 1/denominator.
  double K = 0.0;
  /// Minimize jointly over (theta, theta0) in Theta x Theta.
  bool worst_case = false;
  /// g(theta), required for ec and c.
  std::optional<ScalarFunctional> functional;
  /// Radius of the ball around theta0 excluded from box searches; defaults to
  /// 1e-4 * diam(Theta).
  std::optional<double> exclusion_radius;

  /// Throws CriterionError when the fields are inconsistent.
  void validate(int num_params) const;
};

/// A constraint index of the maximin problem: the pair (theta, theta0), or the
/// limit theta -> theta0 along `direction`.
struct Probe {
  ParameterVector theta;
  ParameterVector theta0;
  std::optional<Vector> direction;

  bool is_limit() const { return direction.has_value(); }
};

struct CriterionValue {
  double value = 0.0;
  Probe argmin;
  /// eG only: design point maximizing the denominator at the argmin.
  std::optional<DesignPoint> argmin_x;
  /// The argmin sits within one exclusion radius of the excluded ball.
  bool near_boundary = false;
};

/// Parameters whose H lies within `tolerance` of phi.
struct ActiveSet {
  std::vector<Probe> points;
  double phi = 0.0;
  double tolerance = 0.0;
};

/// Controls the search for min over Theta of H on box domains.
struct SearchOptions {
  GridSpec grid;
  /// Number of best grid points polished by local descent.
  int polish_starts = 10;
  LocalSearchOptions polish;
  /// Number of grid starts polished when collecting an active set.
  int active_starts = 30;
};

/// Default exclusion radius for the given domain.
double default_exclusion_radius(const ParameterDomain& domain);
double exclusion_radius(const CriterionSpec& spec, const ParameterDomain& domain);

/// Active-set tolerance max(1e-8, 1e-6 phi).
double active_tolerance(double phi);

/// h for one design point: the squared response deviation at x times
/// [K + 1/denominator]. std::nullopt when the denominator vanishes (the
/// constraint is vacuous). For eG the denominator is the max squared deviation
/// over `design_space`.
std::optional<double> h_ratio(const CriterionSpec& spec, const RegressionModel& model,
                              const DesignPoint& x, const ParameterVector& theta,
                              const DesignSpace& design_space = {},
                              const std::optional<ParameterVector>& theta0_override = {});

/// H(xi, theta): the xi-average of the numerators times [K + 1/denominator].
/// For eG the denominator uses `design_space` (defaults to the support of xi).
std::optional<double> H_value(const CriterionSpec& spec, const RegressionModel& model,
                              const DesignMeasure& xi, const ParameterVector& theta,
                              const DesignSpace& design_space = {},
                              const std::optional<ParameterVector>& theta0_override = {});

/// H(xi, probe); limit probes give the limit of H along their direction.
std::optional<double> H_value(const CriterionSpec& spec, const RegressionModel& model,
                              const DesignMeasure& xi, const Probe& probe,
                              const DesignSpace& design_space = {});

/// lim H(xi, theta) as theta -> theta0: lambda_min[M] for eE (direction: its
/// eigenvector) and [c^T M^- c]^-1 for ec (direction: M^- c, or the null-space
/// part of c when c is not estimable). Not defined for eG.
struct LimitValue {
  double value = 0.0;
  Vector direction;
};
LimitValue limit_value(const CriterionSpec& spec, const RegressionModel& model,
                       const DesignMeasure& xi, const ParameterVector& theta0);

/// phi(xi) = min over Theta of H. Exact on finite sets; grid + local polish plus
/// the theta -> theta0 limit (eE, ec) on boxes.
CriterionValue evaluate_phi(const CriterionSpec& spec, const RegressionModel& model,
                            const DesignMeasure& xi, const ParameterDomain& domain,
                            const SearchOptions& options = {},
                            const DesignSpace& design_space = {});

/// Classical criteria at theta0: E -> lambda_min, D -> det^(1/p),
/// c -> [c^T M^- c]^-1 (0 when c is not estimable), G -> [max_x J^T M^- J]^-1
/// over `design_space`. D and G are 0 when M is singular.
double classical_value(CriterionKind kind, const RegressionModel& model, const DesignMeasure& xi,
                       const ParameterVector& theta0,
                       const ScalarFunctional* functional = nullptr,
                       const DesignSpace& design_space = {});

/// Symmetric generalized inverse dropping eigenvalues below 1e-10 * max(1, lambda_max).
Matrix generalized_inverse(const Matrix& m);
/// [c^T M^- c]^-1, or 0 when ||(I - M M^-) c|| > 1e-8 max(1, ||c||).
double c_value(const Matrix& m, const Vector& c);

/// Near-minimizers of H(xi, .) over Theta within active_tolerance(phi).
/// `seeds` are extra start points for local polishing (e.g. generated cuts).
ActiveSet active_set(const CriterionSpec& spec, const RegressionModel& model,
                     const DesignMeasure& xi, const ParameterDomain& domain,
                     const SearchOptions& options = {}, const DesignSpace& design_space = {},
                     const std::vector<Probe>& seeds = {});

/// min over active points of H(nu, theta) minus phi(xi).
double directional_derivative(const CriterionSpec& spec, const RegressionModel& model,
                              const DesignMeasure& xi, const DesignMeasure& nu,
                              const ActiveSet& active, const DesignSpace& design_space = {});

struct Certificate {
  /// min over measures mu on the active set of max over x of the mu-average of Psi.
  double value = 0.0;
  Vector mu;
  /// Psi(x, theta_j): rows design points, columns active points.
  Matrix psi;
};

/// Equivalence-theorem check; value <= tol certifies optimality of xi on the
/// finite design space.
Certificate optimality_certificate(const CriterionSpec& spec, const RegressionModel& model,
                                   const DesignMeasure& xi, const DesignSpace& space,
                                   const ActiveSet& active);

}  // namespace extdesign
