#pragma once

#include <functional>
#include <optional>
#include <string>

#include "extdesign/common.hpp"

namespace extdesign {

/// Regression model eta(x, theta), twice differentiable in theta.
///
/// Jacobian and Hessian (with respect to theta) are optional; when absent,
/// central finite differences are used. Instances are immutable.
class RegressionModel {
 public:
  using Response = std::function<double(const DesignPoint&, const ParameterVector&)>;
  using Jacobian = std::function<Vector(const DesignPoint&, const ParameterVector&)>;
  using Hessian = std::function<Matrix(const DesignPoint&, const ParameterVector&)>;

  RegressionModel(std::string name, int p, int d, Response response,
                  Jacobian jacobian = nullptr, Hessian hessian = nullptr);

  const std::string& name() const { return name_; }
  int num_params() const { return p_; }
  int design_dim() const { return d_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }
  bool has_analytic_hessian() const { return static_cast<bool>(hessian_); }

  double response(const DesignPoint& x, const ParameterVector& theta) const;
  Vector jacobian(const DesignPoint& x, const ParameterVector& theta) const;
  Matrix hessian(const DesignPoint& x, const ParameterVector& theta) const;

  /// Finite-difference versions, available even when analytic derivatives exist.
  Vector numeric_jacobian(const DesignPoint& x, const ParameterVector& theta) const;
  Matrix numeric_hessian(const DesignPoint& x, const ParameterVector& theta) const;

 private:
  void check_dims(const DesignPoint& x, const ParameterVector& theta) const;

  std::string name_;
  int p_;
  int d_;
  Response response_;
  Jacobian jacobian_;
  Hessian hessian_;
};

/// Central-difference step for coordinate value v.
double fd_step(double v);

/// Numeric options of the built-in models. Only the circle model has one.
struct ModelOptions {
  double radius = 1.0;
};

/// Built-in models: "circle", "bilinear2d", "pk1".
RegressionModel builtin_model(const std::string& name, const ModelOptions& options = {});

/// eta(x, theta) = r cos(t - u theta), x = (t, u).
RegressionModel circle_model(double radius);
/// eta(x, theta) = theta1 x1 + theta1^3 (1 - x1) + theta2 x2 + theta2^2 (1 - x2).
RegressionModel bilinear2d_model();
/// One-compartment model with first-order absorption:
/// eta(x, theta) = theta1 [exp(-theta2 x) - exp(-theta3 x)].
RegressionModel pk1_model();

/// Linear model eta(x, theta) = f(x)^T theta with the given regressor.
RegressionModel linear_model(std::string name, int p, int d,
                             std::function<Vector(const DesignPoint&)> regressor);

}  // namespace extdesign
