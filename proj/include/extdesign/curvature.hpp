#pragma once

#include <cstdint>

#include "extdesign/design.hpp"
#include "extdesign/model.hpp"

namespace extdesign {

/// Parametric, intrinsic and total curvature of the expectation surface for a
/// design measure, at sigma = 1. Each is a supremum over directions u of
/// ||Q sum_ij u_i u_j d2eta/dtheta_i dtheta_j||_xi / u^T M u, with Q the tangent
/// projector (parametric), its complement (intrinsic) or the identity (total).
struct CurvatureReport {
  double C_par = 0.0;
  double C_int = 0.0;
  double C_tot = 0.0;
  Vector u_par;
  Vector u_int;
  Vector u_tot;
  /// M(xi, theta) is singular: all three measures are +inf.
  bool singular = false;
};

struct CurvatureOptions {
  int starts = 200;
  std::uint64_t seed = 20131001;
  double tol = 1e-10;
};

/// Projection of f (values on the support of xi) onto the span of the jacobian
/// coordinate functions in L2(xi). A singular M needs allow_singular, and then
/// uses the generalized inverse.
Vector tangent_project(const RegressionModel& model, const DesignMeasure& xi,
                       const ParameterVector& theta, const Vector& f,
                       bool allow_singular = false);

CurvatureReport curvature_measures(const RegressionModel& model, const DesignMeasure& xi,
                                   const ParameterVector& theta,
                                   const CurvatureOptions& options = {});

}  // namespace extdesign
