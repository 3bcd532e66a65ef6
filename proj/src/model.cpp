#include "extdesign/model.hpp"

#include <cmath>
#include <utility>

namespace extdesign {

double fd_step(double v) { return std::max(1e-6, 1e-6 * std::abs(v)); }

RegressionModel::RegressionModel(std::string name, int p, int d, Response response,
                                 Jacobian jacobian, Hessian hessian)
    : name_(std::move(name)),
      p_(p),
      d_(d),
      response_(std::move(response)),
      jacobian_(std::move(jacobian)),
      hessian_(std::move(hessian)) {
  if (p_ < 1 || d_ < 1) throw ModelError("model '" + name_ + "': dimensions must be positive");
  if (!response_) throw ModelError("model '" + name_ + "': missing response function");
}

void RegressionModel::check_dims(const DesignPoint& x, const ParameterVector& theta) const {
  if (x.size() != d_) {
    throw ModelError("model '" + name_ + "': design point has dimension " +
                     std::to_string(x.size()) + ", expected " + std::to_string(d_));
  }
  if (theta.size() != p_) {
    throw ModelError("model '" + name_ + "': parameter has dimension " +
                     std::to_string(theta.size()) + ", expected " + std::to_string(p_));
  }
}

double RegressionModel::response(const DesignPoint& x, const ParameterVector& theta) const {
  check_dims(x, theta);
  return response_(x, theta);
}

Vector RegressionModel::jacobian(const DesignPoint& x, const ParameterVector& theta) const {
  check_dims(x, theta);
  Vector j = jacobian_ ? jacobian_(x, theta) : numeric_jacobian(x, theta);
  if (!j.allFinite()) throw NumericError("model '" + name_ + "': non-finite jacobian");
  return j;
}

Matrix RegressionModel::hessian(const DesignPoint& x, const ParameterVector& theta) const {
  check_dims(x, theta);
  if (!hessian_) return numeric_hessian(x, theta);
  Matrix h = hessian_(x, theta);
  if (!h.allFinite()) throw NumericError("model '" + name_ + "': non-finite hessian");
  return h;
}

Vector RegressionModel::numeric_jacobian(const DesignPoint& x,
                                         const ParameterVector& theta) const {
  check_dims(x, theta);
  Vector j(p_);
  ParameterVector t = theta;
  for (int i = 0; i < p_; ++i) {
    const double h = fd_step(theta[i]);
    t[i] = theta[i] + h;
    const double fp = response_(x, t);
    t[i] = theta[i] - h;
    const double fm = response_(x, t);
    t[i] = theta[i];
    j[i] = (fp - fm) / (2.0 * h);
  }
  if (!j.allFinite()) throw NumericError("model '" + name_ + "': non-finite jacobian");
  return j;
}

Matrix RegressionModel::numeric_hessian(const DesignPoint& x,
                                        const ParameterVector& theta) const {
  check_dims(x, theta);
  Matrix h(p_, p_);
  ParameterVector t = theta;
  auto grad = [&](const ParameterVector& at) {
    return jacobian_ ? Vector(jacobian_(x, at)) : numeric_jacobian(x, at);
  };
  for (int i = 0; i < p_; ++i) {
    const double step = fd_step(theta[i]);
    t[i] = theta[i] + step;
    const Vector gp = grad(t);
    t[i] = theta[i] - step;
    const Vector gm = grad(t);
    t[i] = theta[i];
    h.col(i) = (gp - gm) / (2.0 * step);
  }
  Matrix sym = 0.5 * (h + h.transpose());
  if (!sym.allFinite()) throw NumericError("model '" + name_ + "': non-finite hessian");
  return sym;
}

RegressionModel circle_model(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ModelError("circle model: radius must be positive and finite");
  }
  const double r = radius;
  auto response = [r](const DesignPoint& x, const ParameterVector& th) {
    return r * std::cos(x[0] - x[1] * th[0]);
  };
  auto jacobian = [r](const DesignPoint& x, const ParameterVector& th) {
    Vector j(1);
    j[0] = r * x[1] * std::sin(x[0] - x[1] * th[0]);
    return j;
  };
  auto hessian = [r](const DesignPoint& x, const ParameterVector& th) {
    Matrix h(1, 1);
    h(0, 0) = -r * x[1] * x[1] * std::cos(x[0] - x[1] * th[0]);
    return h;
  };
  return RegressionModel("circle", 1, 2, response, jacobian, hessian);
}

RegressionModel bilinear2d_model() {
  auto response = [](const DesignPoint& x, const ParameterVector& th) {
    const double a = th[0];
    const double b = th[1];
    return a * x[0] + a * a * a * (1.0 - x[0]) + b * x[1] + b * b * (1.0 - x[1]);
  };
  auto jacobian = [](const DesignPoint& x, const ParameterVector& th) {
    Vector j(2);
    j[0] = x[0] + 3.0 * th[0] * th[0] * (1.0 - x[0]);
    j[1] = x[1] + 2.0 * th[1] * (1.0 - x[1]);
    return j;
  };
  auto hessian = [](const DesignPoint& x, const ParameterVector& th) {
    Matrix h = Matrix::Zero(2, 2);
    h(0, 0) = 6.0 * th[0] * (1.0 - x[0]);
    h(1, 1) = 2.0 * (1.0 - x[1]);
    return h;
  };
  return RegressionModel("bilinear2d", 2, 2, response, jacobian, hessian);
}

RegressionModel pk1_model() {
  auto response = [](const DesignPoint& x, const ParameterVector& th) {
    return th[0] * (std::exp(-th[1] * x[0]) - std::exp(-th[2] * x[0]));
  };
  auto jacobian = [](const DesignPoint& x, const ParameterVector& th) {
    const double t = x[0];
    const double e2 = std::exp(-th[1] * t);
    const double e3 = std::exp(-th[2] * t);
    Vector j(3);
    j << e2 - e3, -th[0] * t * e2, th[0] * t * e3;
    return j;
  };
  auto hessian = [](const DesignPoint& x, const ParameterVector& th) {
    const double t = x[0];
    const double e2 = std::exp(-th[1] * t);
    const double e3 = std::exp(-th[2] * t);
    Matrix h(3, 3);
    h << 0.0, -t * e2, t * e3,
        -t * e2, th[0] * t * t * e2, 0.0,
        t * e3, 0.0, -th[0] * t * t * e3;
    return h;
  };
  return RegressionModel("pk1", 3, 1, response, jacobian, hessian);
}

RegressionModel linear_model(std::string name, int p, int d,
                             std::function<Vector(const DesignPoint&)> regressor) {
  auto response = [regressor](const DesignPoint& x, const ParameterVector& th) {
    return regressor(x).dot(th);
  };
  auto jacobian = [regressor](const DesignPoint& x, const ParameterVector&) {
    return regressor(x);
  };
  auto hessian = [p](const DesignPoint&, const ParameterVector&) {
    return Matrix(Matrix::Zero(p, p));
  };
  return RegressionModel(std::move(name), p, d, response, jacobian, hessian);
}

RegressionModel builtin_model(const std::string& name, const ModelOptions& options) {
  if (name == "circle") return circle_model(options.radius);
  if (name == "bilinear2d") return bilinear2d_model();
  if (name == "pk1") return pk1_model();
  throw RegistryError("unknown model '" + name + "' (known: circle, bilinear2d, pk1)");
}

}  // namespace extdesign
