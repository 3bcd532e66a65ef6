#include "examples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "extdesign/functional.hpp"

namespace extdesign::examples {

namespace {

DesignPoint pt(double a, double b) { return (DesignPoint(2) << a, b).finished(); }

DesignMeasure weighted(const DesignSpace& pts, std::vector<double> w) {
  ValidateOptions opts;
  opts.renormalize = true;
  return validate_design(pts, Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size())), opts);
}

}  // namespace

const DesignMeasure& Setup::design(const std::string& name) const {
  for (const auto& [n, xi] : designs) {
    if (n == name) return xi;
  }
  throw DesignError("unknown example design '" + name + "'");
}

CriterionSpec Setup::spec(CriterionKind kind) const {
  CriterionSpec s;
  s.kind = kind;
  s.theta0 = theta0;
  return s;
}

DesignSpace points_1d(const std::vector<double>& xs) {
  DesignSpace s;
  for (double x : xs) s.push_back(DesignPoint::Constant(1, x));
  return s;
}

DesignSpace range_1d(double a, double step, double b) {
  const auto n = static_cast<int>(std::floor((b - a) / step + 1e-9));
  DesignSpace s;
  for (int i = 0; i <= n; ++i) s.push_back(DesignPoint::Constant(1, a + step * i));
  return s;
}

DesignMeasure circle_design(double u) {
  return validate_design({pt(0.0, u), pt(std::numbers::pi / 2.0, u)}, Vector::Constant(2, 0.5));
}

Setup example2() {
  Setup s{bilinear2d_model(), Vector::Constant(2, 0.125),
          Box((Vector(2) << -3.0, -2.0).finished(), (Vector(2) << 4.0, 2.0).finished()),
          {pt(0, 0), pt(0, 1), pt(1, 0), pt(1, 1)},
          {}};
  s.designs.emplace_back("xi_D", weighted({pt(0, 1), pt(1, 0), pt(1, 1)}, {0.4134, 0.3184, 0.2682}));
  s.designs.emplace_back("xi_E", weighted({pt(0, 1), pt(1, 0)}, {0.5113, 0.4887}));
  return s;
}

Setup example3() {
  Setup s{pk1_model(), (Vector(3) << 21.80, 0.05884, 4.298).finished(),
          Box((Vector(3) << 16.0, 0.03, 3.0).finished(), (Vector(3) << 27.0, 0.08, 6.0).finished()),
          range_1d(0.2, 0.2, 24.0),
          {}};
  s.designs.emplace_back("xi_D", weighted(points_1d({0.229, 1.389, 18.42}), {1, 1, 1}));
  s.designs.emplace_back("xi_E", weighted(points_1d({0.170, 1.398, 23.36}), {0.199, 0.662, 0.139}));
  s.designs.emplace_back("xi_c1", weighted(points_1d({0.2327, 17.63}), {0.0135, 0.9865}));
  s.designs.emplace_back("xi_c2", weighted(points_1d({0.1793, 3.5671}), {0.6062, 0.3938}));
  s.designs.emplace_back("xi_c3", weighted(points_1d({1.0122}), {1.0}));
  return s;
}

Setup example4() {
  Setup s{pk1_model(), (Vector(3) << 0.773, 0.214, 2.09).finished(),
          Box(Vector::Zero(3), Vector::Constant(3, 5.0)), range_1d(0.0, 0.1, 16.0), {}};
  s.designs.emplace_back("xi_0", uniform_design(range_1d(1.0, 1.0, 16.0)));
  s.designs.emplace_back("xi_D", weighted(points_1d({0.42, 1.82, 6.80}), {1, 1, 1}));
  s.designs.emplace_back("xi_E", weighted(points_1d({0.29, 1.83, 9.0}), {0.4424, 0.3318, 0.2258}));
  return s;
}

DesignSpace example3_ec_support(const Setup& ex3, int i) {
  std::vector<double> xs;
  for (const char* name : {"xi_D", "xi_E"}) {
    for (const auto& x : ex3.design(name).support()) xs.push_back(x[0]);
  }
  for (const auto& x : ex3.design("xi_c" + std::to_string(i)).support()) xs.push_back(x[0]);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return points_1d(xs);
}

std::string pk1_functional_name(int i) {
  static const char* names[] = {"auc", "tmax", "cmax"};
  if (i < 1 || i > 3) throw RegistryError("functional index must be 1, 2 or 3");
  return names[i - 1];
}

}  // namespace extdesign::examples
