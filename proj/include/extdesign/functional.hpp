#pragma once

#include <functional>
#include <string>

#include "extdesign/common.hpp"

namespace extdesign {

/// Scalar function g(theta) of the parameters, with an optional analytic gradient.
class ScalarFunctional {
 public:
  using Value = std::function<double(const ParameterVector&)>;
  using Gradient = std::function<Vector(const ParameterVector&)>;

  ScalarFunctional(std::string name, Value value, Gradient gradient = nullptr);

  const std::string& name() const { return name_; }
  double operator()(const ParameterVector& theta) const { return value_(theta); }
  /// Analytic gradient when available, central differences otherwise.
  Vector gradient(const ParameterVector& theta) const;
  Vector numeric_gradient(const ParameterVector& theta) const;

 private:
  std::string name_;
  Value value_;
  Gradient gradient_;
};

/// Functionals of the one-compartment model: "auc" (area under the curve),
/// "tmax" (time to maximum concentration), "cmax" (maximum concentration).
ScalarFunctional pk1_functional(const std::string& name);

/// c^T theta.
ScalarFunctional linear_functional(const Vector& c);

}  // namespace extdesign
