#include "extdesign/functional.hpp"

#include <cmath>
#include <utility>

#include "extdesign/model.hpp"

namespace extdesign {

ScalarFunctional::ScalarFunctional(std::string name, Value value, Gradient gradient)
    : name_(std::move(name)), value_(std::move(value)), gradient_(std::move(gradient)) {
  if (!value_) throw CriterionError("functional '" + name_ + "': missing value function");
}

Vector ScalarFunctional::gradient(const ParameterVector& theta) const {
  Vector g = gradient_ ? gradient_(theta) : numeric_gradient(theta);
  if (!g.allFinite()) throw NumericError("functional '" + name_ + "': non-finite gradient");
  return g;
}

Vector ScalarFunctional::numeric_gradient(const ParameterVector& theta) const {
  Vector g(theta.size());
  ParameterVector t = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double h = fd_step(theta[i]);
    t[i] = theta[i] + h;
    const double fp = value_(t);
    t[i] = theta[i] - h;
    const double fm = value_(t);
    t[i] = theta[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

namespace {

double tmax(const ParameterVector& th) {
  return (std::log(th[2]) - std::log(th[1])) / (th[2] - th[1]);
}

Vector tmax_gradient(const ParameterVector& th) {
  const double l = std::log(th[2]) - std::log(th[1]);
  const double d = th[2] - th[1];
  Vector g(3);
  g << 0.0, (l - d / th[1]) / (d * d), (d / th[2] - l) / (d * d);
  return g;
}

}  // namespace

ScalarFunctional pk1_functional(const std::string& name) {
  if (name == "auc") {
    return ScalarFunctional(
        "auc", [](const ParameterVector& th) { return th[0] * (1.0 / th[1] - 1.0 / th[2]); },
        [](const ParameterVector& th) {
          Vector g(3);
          g << 1.0 / th[1] - 1.0 / th[2], -th[0] / (th[1] * th[1]), th[0] / (th[2] * th[2]);
          return g;
        });
  }
  if (name == "tmax") return ScalarFunctional("tmax", tmax, tmax_gradient);
  if (name == "cmax") {
    // d eta / dx vanishes at tmax, so the gradient is the model jacobian there.
    static const RegressionModel model = pk1_model();
    return ScalarFunctional(
        "cmax",
        [](const ParameterVector& th) {
          DesignPoint x(1);
          x[0] = tmax(th);
          return model.response(x, th);
        },
        [](const ParameterVector& th) {
          DesignPoint x(1);
          x[0] = tmax(th);
          return model.jacobian(x, th);
        });
  }
  throw RegistryError("unknown functional '" + name + "' (known: auc, tmax, cmax)");
}

ScalarFunctional linear_functional(const Vector& c) {
  return ScalarFunctional(
      "linear", [c](const ParameterVector& th) { return c.dot(th); },
      [c](const ParameterVector&) { return c; });
}

}  // namespace extdesign
