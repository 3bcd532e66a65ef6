#include "extdesign/local_search.hpp"

#include <cmath>
#include <limits>

namespace extdesign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class UnitProblem {
 public:
  UnitProblem(const Objective& f, const ObjectiveGradient& grad, const Box& box, double h)
      : f_(f), grad_(grad), box_(box), h_(h), width_(box.upper - box.lower) {}

  double value(const Vector& u) {
    ++evaluations;
    const double v = f_(box_.from_unit(u));
    return std::isnan(v) ? kInf : v;
  }

  Vector gradient(const Vector& u, double fu) {
    const Eigen::Index p = u.size();
    Vector g = Vector::Zero(p);
    if (grad_) {
      g = grad_(box_.from_unit(u)).cwiseProduct(width_);
      return g;
    }
    Vector t = u;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (width_[i] <= 0.0) continue;
      const double up = std::min(1.0, u[i] + h_);
      const double dn = std::max(0.0, u[i] - h_);
      t[i] = up;
      const double fp = up > u[i] ? value(t) : kInf;
      t[i] = dn;
      const double fm = dn < u[i] ? value(t) : kInf;
      t[i] = u[i];
      if (std::isfinite(fp) && std::isfinite(fm)) {
        g[i] = (fp - fm) / (up - dn);
      } else if (std::isfinite(fp)) {
        g[i] = (fp - fu) / (up - u[i]);
      } else if (std::isfinite(fm)) {
        g[i] = (fu - fm) / (u[i] - dn);
      }
    }
    return g;
  }

  int evaluations = 0;

 private:
  const Objective& f_;
  const ObjectiveGradient& grad_;
  const Box& box_;
  double h_;
  Vector width_;
};

Vector project_unit(const Vector& u) { return u.cwiseMax(0.0).cwiseMin(1.0); }

}  // namespace

LocalSearchResult minimize_in_box(const Objective& f, const Box& box, const Vector& x0,
                                  const LocalSearchOptions& options,
                                  const ObjectiveGradient& gradient) {
  UnitProblem prob(f, gradient, box, options.fd_step);
  const Eigen::Index p = x0.size();
  Vector u = project_unit(box.to_unit(x0));
  double fu = prob.value(u);

  LocalSearchResult result;
  if (!std::isfinite(fu)) {
    result.x = box.from_unit(u);
    result.f = fu;
    result.evaluations = prob.evaluations;
    return result;
  }

  Matrix hinv = Matrix::Identity(p, p);
  Vector g = prob.gradient(u, fu);
  int stalls = 0;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    // Bounds that the negative gradient pushes against stay fixed this step.
    std::vector<bool> fixed(static_cast<std::size_t>(p), false);
    for (Eigen::Index i = 0; i < p; ++i) {
      if ((u[i] <= 0.0 && g[i] > 0.0) || (u[i] >= 1.0 && g[i] < 0.0)) fixed[static_cast<std::size_t>(i)] = true;
    }
    Vector gf = g;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (fixed[static_cast<std::size_t>(i)]) gf[i] = 0.0;
    }
    if (gf.norm() <= 1e-15 * std::max(1.0, std::abs(fu))) {
      result.converged = true;
      break;
    }
    Vector d = -(hinv * gf);
    for (Eigen::Index i = 0; i < p; ++i) {
      if (fixed[static_cast<std::size_t>(i)]) d[i] = 0.0;
    }
    if (gf.dot(d) >= 0.0) {
      hinv.setIdentity();
      d = -gf;
    }
    // Cap the first trial step at the unit cube size.
    const double dn = d.norm();
    if (dn > 1.0) d /= dn;

    double alpha = 1.0;
    Vector trial;
    double ftrial = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      trial = project_unit(u + alpha * d);
      ftrial = prob.value(trial);
      if (std::isfinite(ftrial) && ftrial <= fu + 1e-4 * g.dot(trial - u)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted || !(ftrial < fu)) {
      if (hinv.isIdentity()) {
        result.converged = true;
        break;
      }
      hinv.setIdentity();
      continue;
    }
    const Vector s = trial - u;
    const double decrease = fu - ftrial;
    u = trial;
    const double fold = fu;
    fu = ftrial;
    const Vector gnew = prob.gradient(u, fu);
    const Vector y = gnew - g;
    g = gnew;
    const double sy = s.dot(y);
    if (sy > 1e-300 && sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Matrix eye = Matrix::Identity(p, p);
      hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    if (decrease <= options.f_tol * std::max(std::abs(fold), 1e-300)) {
      if (++stalls >= 2) {
        result.converged = true;
        break;
      }
    } else {
      stalls = 0;
    }
  }
  result.x = box.from_unit(u);
  result.f = fu;
  result.iterations = it;
  result.evaluations = prob.evaluations;
  return result;
}

}  // namespace extdesign
