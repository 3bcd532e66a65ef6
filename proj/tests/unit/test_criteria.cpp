#include <doctest.h>

#include <cmath>
#include <numbers>

#include "extdesign/criteria.hpp"
#include "extdesign/cutting_plane.hpp"
#include "examples.hpp"
#include "oracles.hpp"

using namespace extdesign;

namespace {

DesignPoint pt(double a) { return DesignPoint::Constant(1, a); }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) out[i++] = a;
  return out;
}

// H computed straight from the responses.
double direct_H(const CriterionSpec& spec, const RegressionModel& model, const DesignMeasure& xi,
                const Vector& theta, const Vector& theta0, const DesignSpace& space = {}) {
  auto dev2 = [&](const DesignPoint& x) {
    const double d = model.response(x, theta) - model.response(x, theta0);
    return d * d;
  };
  double num = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) num += xi.weight(i) * dev2(xi.point(i));
  double den = 0.0;
  switch (spec.kind) {
    case CriterionKind::eE:
      den = (theta - theta0).squaredNorm();
      break;
    case CriterionKind::ec: {
      const double d = (*spec.functional)(theta) - (*spec.functional)(theta0);
      den = d * d;
      break;
    }
    default:
      for (const auto& x : space.empty() ? xi.support() : space) den = std::max(den, dev2(x));
  }
  return num * (spec.K + 1.0 / den);
}

RegressionModel quadratic() {
  return linear_model("quadratic", 3, 1, [](const DesignPoint& x) {
    return vec({1.0, x[0], x[0] * x[0]});
  });
}

SearchOptions small_search(int n = 3000) {
  SearchOptions s;
  s.grid.n_points = n;
  return s;
}

std::vector<ParameterVector> random_thetas(const Box& box, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ParameterVector> out;
  for (int i = 0; i < n; ++i) {
    Vector u(box.dim());
    for (int j = 0; j < box.dim(); ++j) u[j] = rng.uniform();
    out.push_back(box.from_unit(u));
  }
  return out;
}

}  // namespace

TEST_CASE("spec validation") {
  CriterionSpec s;
  s.theta0 = vec({1.0, 1.0});
  CHECK_NOTHROW(s.validate(2));
  CHECK_THROWS_AS(s.validate(3), CriterionError);
  s.K = -1.0;
  CHECK_THROWS_AS(s.validate(2), CriterionError);
  s.K = 0.0;
  s.kind = CriterionKind::ec;
  CHECK_THROWS_AS(s.validate(2), CriterionError);
  s.kind = CriterionKind::eE;
  s.theta0.reset();
  CHECK_THROWS_AS(s.validate(2), CriterionError);
  CHECK(parse_criterion_kind("eG") == CriterionKind::eG);
  CHECK_THROWS(parse_criterion_kind("eX"));
}

TEST_CASE("H agrees with the direct formula, with and without K") {
  const auto ex = examples::example2();
  const auto& xi = ex.design("xi_D");
  for (CriterionKind kind : {CriterionKind::eE, CriterionKind::eG}) {
    for (double K : {0.0, 0.7}) {
      CriterionSpec spec = ex.spec(kind);
      spec.K = K;
      for (const auto& th : random_thetas(ex.box, 25, 11)) {
        const auto h = H_value(spec, ex.model, xi, th, ex.space);
        REQUIRE(h.has_value());
        CHECK(*h == doctest::Approx(direct_H(spec, ex.model, xi, th, ex.theta0, ex.space)).epsilon(1e-12));
      }
    }
  }
  const auto ex3 = examples::example3();
  CriterionSpec ec = ex3.spec(CriterionKind::ec);
  ec.functional = pk1_functional("auc");
  for (const auto& th : random_thetas(ex3.box, 25, 12)) {
    const auto h = H_value(ec, ex3.model, ex3.design("xi_D"), th);
    REQUIRE(h.has_value());
    CHECK(*h == doctest::Approx(direct_H(ec, ex3.model, ex3.design("xi_D"), th, ex3.theta0)).epsilon(1e-10));
  }
}

TEST_CASE("H is the xi-average of h and affine in xi") {
  const auto ex = examples::example2();
  const auto& a = ex.design("xi_D");
  const auto& b = ex.design("xi_E");
  for (CriterionKind kind : {CriterionKind::eE, CriterionKind::eG}) {
    const CriterionSpec spec = ex.spec(kind);
    for (const auto& th : random_thetas(ex.box, 10, 3)) {
      double avg = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        avg += a.weight(i) * *h_ratio(spec, ex.model, a.point(i), th, ex.space);
      }
      CHECK(*H_value(spec, ex.model, a, th, ex.space) == doctest::Approx(avg).epsilon(1e-12));
      const double mixed = *H_value(spec, ex.model, a.mix(b, 0.3), th, ex.space);
      const double lin = 0.7 * *H_value(spec, ex.model, a, th, ex.space) +
                         0.3 * *H_value(spec, ex.model, b, th, ex.space);
      CHECK(mixed == doctest::Approx(lin).epsilon(1e-12));
    }
  }
}

TEST_CASE("eG ratio lies in [0, 1] when the design space covers the support") {
  const auto ex = examples::example2();
  const CriterionSpec spec = ex.spec(CriterionKind::eG);
  for (const auto& th : random_thetas(ex.box, 200, 4)) {
    const auto h = H_value(spec, ex.model, ex.design("xi_D"), th, ex.space);
    if (!h) continue;
    CHECK(*h >= 0.0);
    CHECK(*h <= 1.0 + 1e-12);
  }
}

TEST_CASE("vacuous constraint: theta giving the anchor responses everywhere") {
  const auto ex = examples::example2();
  CHECK_FALSE(H_value(ex.spec(CriterionKind::eG), ex.model, ex.design("xi_D"), ex.theta0, ex.space)
                  .has_value());
}

TEST_CASE("circle model: H(nu_u, 1) = r^2 (1 - cos u) and the u = pi optimum") {
  for (double r : {1.0, 2.0}) {
    const RegressionModel model = circle_model(r);
    CriterionSpec spec;
    spec.theta0 = Vector::Zero(1);
    for (double u : {0.3, 1.0, 2.5, std::numbers::pi}) {
      const auto h = H_value(spec, model, examples::circle_design(u), Vector::Ones(1));
      CHECK(*h == doctest::Approx(r * r * (1.0 - std::cos(u))).epsilon(1e-12));
    }
  }
  CriterionSpec spec;
  spec.theta0 = Vector::Zero(1);
  const ParameterDomain dom(Box(Vector::Zero(1), Vector::Ones(1)));
  const auto v = evaluate_phi(spec, circle_model(1.0), examples::circle_design(std::numbers::pi), dom,
                              small_search(500));
  CHECK(v.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(v.argmin.theta[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("one-parameter linear model on {-1, 1}: phi_eE = 1") {
  const RegressionModel model =
      linear_model("slope", 1, 1, [](const DesignPoint& x) { return Vector::Constant(1, x[0]); });
  CriterionSpec spec;
  spec.theta0 = Vector::Zero(1);
  const ParameterDomain dom(Box(-Vector::Ones(1), Vector::Ones(1)));
  const auto v = evaluate_phi(spec, model, uniform_design({pt(-1), pt(1)}), dom, small_search(200));
  CHECK(v.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("linear model: extended criteria reduce to the classical ones") {
  const RegressionModel model = quadratic();
  const DesignMeasure xi = validate_design({pt(-1), pt(0), pt(1)}, vec({0.3, 0.45, 0.25}));
  const DesignSpace space{pt(-1), pt(-0.5), pt(0), pt(0.5), pt(1)};
  const Vector theta0 = vec({0.2, -0.1, 0.3});
  const ParameterDomain dom(Box(vec({-1, -1, -1}), vec({1, 1, 1})));

  Matrix m = Matrix::Zero(3, 3);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const Vector f = vec({1.0, xi.point(i)[0], xi.point(i)[0] * xi.point(i)[0]});
    m += xi.weight(i) * f * f.transpose();
  }
  const Matrix m_inv = m.inverse();
  const double lam = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues()[0];

  CriterionSpec eE;
  eE.theta0 = theta0;
  CHECK(evaluate_phi(eE, model, xi, dom, small_search()).value == doctest::Approx(lam).epsilon(1e-9));
  CHECK(limit_value(eE, model, xi, theta0).value == doctest::Approx(lam).epsilon(1e-12));
  CHECK(classical_value(CriterionKind::E, model, xi, theta0) == doctest::Approx(lam).epsilon(1e-12));

  const Vector c = vec({0.0, 1.0, 0.5});
  CriterionSpec ec = eE;
  ec.kind = CriterionKind::ec;
  ec.functional = linear_functional(c);
  const double c_ref = 1.0 / c.dot(m_inv * c);
  CHECK(evaluate_phi(ec, model, xi, dom, small_search()).value == doctest::Approx(c_ref).epsilon(1e-9));
  CHECK(classical_value(CriterionKind::c, model, xi, theta0, &*ec.functional) ==
        doctest::Approx(c_ref).epsilon(1e-12));

  double g_max = 0.0;
  for (const auto& x : space) {
    const Vector f = vec({1.0, x[0], x[0] * x[0]});
    g_max = std::max(g_max, f.dot(m_inv * f));
  }
  CriterionSpec eG = eE;
  eG.kind = CriterionKind::eG;
  CHECK(classical_value(CriterionKind::G, model, xi, theta0, nullptr, space) ==
        doctest::Approx(1.0 / g_max).epsilon(1e-12));
  CHECK(evaluate_phi(eG, model, xi, dom, small_search(), space).value ==
        doctest::Approx(1.0 / g_max).epsilon(1e-4));
  CHECK(classical_value(CriterionKind::D, model, xi, theta0) ==
        doctest::Approx(std::cbrt(m.determinant())).epsilon(1e-12));
}

TEST_CASE("classical values of the bilinear reference designs") {
  const auto ex = examples::example2();
  const auto& xi = ex.design("xi_D");
  const double det13 = std::cbrt(std::pow(classical_value(CriterionKind::D, ex.model, xi, ex.theta0), 2));
  CHECK(det13 == doctest::Approx(0.652).epsilon(0.01));
  CHECK(classical_value(CriterionKind::E, ex.model, xi, ex.theta0) == doctest::Approx(0.273).epsilon(0.01));
  CHECK(classical_value(CriterionKind::D, ex.model, uniform_design({ex.space[0]}), ex.theta0) == 0.0);
}

TEST_CASE("c_value and the generalized inverse") {
  CHECK(c_value(Matrix::Identity(2, 2), vec({1, 0})) == doctest::Approx(1.0));
  const Matrix sing = vec({1, 0}).asDiagonal();
  CHECK(c_value(sing, vec({0, 1})) == 0.0);
  CHECK(c_value(sing, vec({2, 0})) == doctest::Approx(0.25));
  Rng rng(8);
  Matrix b(4, 2);
  for (int i = 0; i < 8; ++i) b(i % 4, i / 4) = rng.normal();
  const Matrix m = b * b.transpose();
  const Matrix g = generalized_inverse(m);
  CHECK((m * g * m - m).norm() <= 1e-10 * m.norm());
  CHECK((g * m * g - g).norm() <= 1e-8 * std::max(1.0, g.norm()));
}

TEST_CASE("bilinear xi_E: a second parameter reproduces the anchor responses") {
  const auto ex = examples::example2();
  const double a = ex.theta0[0], b = ex.theta0[1];
  // Newton on theta1^3 + theta2 = a^3 + b, theta1 + theta2^2 = a + b^2.
  Vector th = vec({-1.0, 1.0});
  for (int it = 0; it < 50; ++it) {
    const Vector r = vec({std::pow(th[0], 3) + th[1] - a * a * a - b, th[0] + th[1] * th[1] - a - b * b});
    Matrix j(2, 2);
    j << 3 * th[0] * th[0], 1, 1, 2 * th[1];
    th -= j.lu().solve(r);
  }
  CHECK(th[0] == doctest::Approx(-0.976).epsilon(0.01));
  CHECK(th[1] == doctest::Approx(1.0567).epsilon(0.01));
  const auto& xi = ex.design("xi_E");
  CHECK(*H_value(ex.spec(CriterionKind::eE), ex.model, xi, th) <= 1e-20);
  const auto v = evaluate_phi(ex.spec(CriterionKind::eE), ex.model, xi, ex.domain(), small_search(10000));
  CHECK(v.value <= 1e-8);
  CHECK((v.argmin.theta - th).norm() <= 1e-3);
  CHECK(classical_value(CriterionKind::E, ex.model, xi, ex.theta0) > 0.3);
}

TEST_CASE("finite Theta: exact minimum, concavity, homogeneity, monotonicity") {
  const auto ex = examples::example2();
  const auto thetas = random_thetas(ex.box, 40, 21);
  const ParameterDomain dom(FiniteSet{thetas});
  const ParameterDomain half(FiniteSet{{thetas.begin(), thetas.begin() + 20}});
  const auto& a = ex.design("xi_D");
  const auto& b = ex.design("xi_E");
  for (CriterionKind kind : {CriterionKind::eE, CriterionKind::eG}) {
    const CriterionSpec spec = ex.spec(kind);
    double brute = std::numeric_limits<double>::infinity();
    for (const auto& th : thetas) brute = std::min(brute, direct_H(spec, ex.model, a, th, ex.theta0, ex.space));
    const double pa = evaluate_phi(spec, ex.model, a, dom, {}, ex.space).value;
    CHECK(pa == doctest::Approx(brute).epsilon(1e-12));
    const double pb = evaluate_phi(spec, ex.model, b, dom, {}, ex.space).value;
    for (double alpha : {0.25, 0.5, 0.9}) {
      const double pm = evaluate_phi(spec, ex.model, a.mix(b, alpha), dom, {}, ex.space).value;
      CHECK(pm >= (1 - alpha) * pa + alpha * pb - 1e-12);
    }
    CHECK(evaluate_phi(spec, ex.model, a.scaled(2.5), dom, {}, ex.space).value ==
          doctest::Approx(2.5 * pa).epsilon(1e-12));
    CHECK(evaluate_phi(spec, ex.model, a, half, {}, ex.space).value >= pa - 1e-15);
  }
}

TEST_CASE("worst case over theta0 never exceeds the anchored criterion") {
  const auto ex = examples::example2();
  const auto thetas = random_thetas(ex.box, 12, 31);
  const ParameterDomain dom(FiniteSet{thetas});
  CriterionSpec wc;
  wc.worst_case = true;
  const double worst = evaluate_phi(wc, ex.model, ex.design("xi_D"), dom).value;
  for (const auto& t0 : thetas) {
    CriterionSpec s;
    s.theta0 = t0;
    CHECK(worst <= evaluate_phi(s, ex.model, ex.design("xi_D"), dom).value + 1e-15);
  }
}

TEST_CASE("box criteria are bounded by their limits") {
  const auto ex = examples::example2();
  for (const auto& name : {"xi_D", "xi_E"}) {
    const auto& xi = ex.design(name);
    const double lam = min_eigenvalue(info_matrix(ex.model, xi, ex.theta0));
    CHECK(evaluate_phi(ex.spec(CriterionKind::eE), ex.model, xi, ex.domain(), small_search()).value <=
          lam + 1e-12);
    CHECK(evaluate_phi(ex.spec(CriterionKind::eG), ex.model, xi, ex.domain(), small_search(), ex.space)
              .value <= 0.5 + 1e-9);
  }
}

TEST_CASE("shrinking the box does not decrease phi") {
  const auto ex = examples::example2();
  const auto& xi = ex.design("xi_D");
  const CriterionSpec spec = ex.spec(CriterionKind::eE);
  double prev = -1.0;
  for (double s : {1.0, 0.5, 0.25, 0.1}) {
    const Vector lo = ex.theta0 + s * (ex.box.lower - ex.theta0);
    const Vector hi = ex.theta0 + s * (ex.box.upper - ex.theta0);
    const double v = evaluate_phi(spec, ex.model, xi, ParameterDomain(Box(lo, hi)), small_search()).value;
    CHECK(v >= prev - 1e-9 * std::max(1.0, std::abs(prev)));
    prev = v;
  }
}

TEST_CASE("directional derivative and certificate") {
  const auto ex = examples::example2();
  const auto thetas = random_thetas(ex.box, 30, 41);
  const ParameterDomain dom(FiniteSet{thetas});
  const CriterionSpec spec = ex.spec(CriterionKind::eE);
  const auto& xi = ex.design("xi_D");
  const ActiveSet act = active_set(spec, ex.model, xi, dom);
  REQUIRE_FALSE(act.points.empty());
  CHECK(std::abs(directional_derivative(spec, ex.model, xi, xi, act)) <= 1e-12);

  SUBCASE("single active point") {
    const Vector th = thetas[0];
    ActiveSet one;
    one.points.push_back(Probe{th, ex.theta0, std::nullopt});
    one.phi = *H_value(spec, ex.model, xi, th);
    double hmax = -1.0;
    for (const auto& x : ex.space) hmax = std::max(hmax, *h_ratio(spec, ex.model, x, th));
    const Certificate c = optimality_certificate(spec, ex.model, xi, ex.space, one);
    CHECK(c.value == doctest::Approx(hmax - one.phi).epsilon(1e-10));
    CHECK(c.value > 0.0);
  }
  SUBCASE("the LP optimum on a finite set certifies") {
    OptimizeOptions opts;
    const auto rep = optimize(spec, ex.model, ex.space, dom, opts);
    REQUIRE(rep.certificate.has_value());
    CHECK(rep.certificate->value <= 1e-8);
  }
}
