#include "extdesign/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "extdesign/criteria.hpp"
#include "extdesign/parallel.hpp"
#include "extdesign/sampling.hpp"

namespace extdesign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Part { Parametric, Intrinsic, Total };

struct SurfaceData {
  Vector w;
  Matrix jac;                // p x n
  std::vector<Matrix> hess;  // n of p x p
  Matrix m;
  Matrix m_inv;
};

double ratio(const SurfaceData& s, const Vector& u, Part part) {
  const auto n = s.w.size();
  Vector q(n);
  for (Eigen::Index k = 0; k < n; ++k) q[k] = u.dot(s.hess[static_cast<std::size_t>(k)] * u);
  const double den = u.dot(s.m * u);
  if (!(den > 0.0)) return 0.0;
  double num2 = 0.0;
  if (part == Part::Total) {
    num2 = s.w.dot(q.cwiseAbs2());
  } else {
    const Vector b = s.jac * s.w.cwiseProduct(q);
    const Vector proj = s.jac.transpose() * (s.m_inv * b);
    num2 = part == Part::Parametric ? s.w.dot(proj.cwiseAbs2())
                                    : s.w.dot((q - proj).cwiseAbs2());
  }
  return std::sqrt(std::max(0.0, num2)) / den;
}

Vector canonical(Vector u) {
  u.normalize();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > 1e-14) {
      if (u[i] < 0.0) u = -u;
      break;
    }
  }
  return u;
}

// Projected gradient ascent on the unit sphere with step halving.
std::pair<double, Vector> ascend(const SurfaceData& s, Vector u, Part part, double tol) {
  u.normalize();
  double f = ratio(s, u, part);
  const auto p = u.size();
  for (int it = 0; it < 500; ++it) {
    Vector g(p);
    for (Eigen::Index i = 0; i < p; ++i) {
      Vector up = u, dn = u;
      up[i] += 1e-6;
      dn[i] -= 1e-6;
      g[i] = (ratio(s, up.normalized(), part) - ratio(s, dn.normalized(), part)) / 2e-6;
    }
    g -= g.dot(u) * u;
    if (g.norm() <= 1e-14) break;
    double step = 1.0 / g.norm();
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      const Vector trial = (u + step * g).normalized();
      const double ft = ratio(s, trial, part);
      if (ft > f) {
        const double gain = ft - f;
        u = trial;
        f = ft;
        moved = gain > tol * std::max(1.0, f);
        break;
      }
    }
    if (!moved) break;
  }
  return {f, canonical(u)};
}

bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

Vector tangent_project(const RegressionModel& model, const DesignMeasure& xi,
                       const ParameterVector& theta, const Vector& f, bool allow_singular) {
  if (f.size() != static_cast<Eigen::Index>(xi.size())) {
    throw DesignError("tangent_project: f must have one value per support point");
  }
  const int p = model.num_params();
  Matrix jac(p, static_cast<Eigen::Index>(xi.size()));
  for (std::size_t k = 0; k < xi.size(); ++k) {
    jac.col(static_cast<Eigen::Index>(k)) = model.jacobian(xi.point(k), theta);
  }
  const Matrix m = info_matrix(model, xi, theta);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector& lam = es.eigenvalues();
  const bool singular = lam[0] <= 1e-10 * std::max(1.0, lam[lam.size() - 1]);
  if (singular && !allow_singular) throw NumericError("tangent_project: singular information matrix");
  const Matrix m_inv = generalized_inverse(m);
  const Vector b = jac * xi.weights().cwiseProduct(f);
  return jac.transpose() * (m_inv * b);
}

CurvatureReport curvature_measures(const RegressionModel& model, const DesignMeasure& xi,
                                   const ParameterVector& theta, const CurvatureOptions& options) {
  const int p = model.num_params();
  SurfaceData s;
  s.w = xi.weights();
  s.jac.resize(p, static_cast<Eigen::Index>(xi.size()));
  for (std::size_t k = 0; k < xi.size(); ++k) {
    s.jac.col(static_cast<Eigen::Index>(k)) = model.jacobian(xi.point(k), theta);
    s.hess.push_back(model.hessian(xi.point(k), theta));
  }
  s.m = info_matrix(model, xi, theta);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.m);
  const Vector& lam = es.eigenvalues();

  CurvatureReport rep;
  if (lam[0] <= 1e-10 * std::max(1.0, lam[lam.size() - 1])) {
    rep.singular = true;
    rep.C_par = rep.C_int = rep.C_tot = kInf;
    return rep;
  }
  s.m_inv = es.eigenvectors() * lam.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();

  std::vector<Vector> starts;
  for (int i = 0; i < p; ++i) starts.push_back(es.eigenvectors().col(i));
  for (int i = 0; i < options.starts; ++i) {
    Rng rng(stream_seed(options.seed, static_cast<std::uint64_t>(i)));
    Vector u(p);
    for (int j = 0; j < p; ++j) u[j] = rng.normal();
    if (u.norm() > 0.0) starts.push_back(u);
  }

  auto best_of = [&](Part part, double& value, Vector& dir) {
    std::vector<std::pair<double, Vector>> found(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) { found[i] = ascend(s, starts[i], part, options.tol); });
    value = -1.0;
    for (const auto& [f, u] : found) {
      if (f > value || (f == value && lex_less(u, dir))) {
        value = f;
        dir = u;
      }
    }
  };
  best_of(Part::Parametric, rep.C_par, rep.u_par);
  best_of(Part::Intrinsic, rep.C_int, rep.u_int);
  best_of(Part::Total, rep.C_tot, rep.u_tot);
  return rep;
}

}  // namespace extdesign
