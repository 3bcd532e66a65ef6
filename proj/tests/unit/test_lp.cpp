#include <doctest.h>

#include "extdesign/lp.hpp"
#include "extdesign/sampling.hpp"
#include "oracles.hpp"

using namespace extdesign;

namespace {

Matrix random_matrix(Rng& rng, int r, int c) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform();
  }
  return m;
}

void check_probability(const Vector& w) {
  CHECK((w.array() >= -1e-12).all());
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

}  // namespace

TEST_CASE("general LP: textbook instance") {
  // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36.
  LinearProgram lp;
  lp.a = (Matrix(3, 2) << 1, 0, 0, 2, 3, 2).finished();
  lp.b = (Vector(3) << 4, 12, 18).finished();
  lp.c = (Vector(2) << 3, 5).finished();
  lp.sense = {RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual};
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(2.0));
  CHECK(r.x[1] == doctest::Approx(6.0));
  CHECK(r.objective == doctest::Approx(36.0));
  CHECK(lp.b.dot(r.duals) == doctest::Approx(36.0));
}

TEST_CASE("general LP: equality, >= rows, free variable, infeasible, unbounded") {
  SUBCASE("mixed senses") {
    // max x + y  s.t.  x + y = 1, x >= 0.3 (as a row), y free  ->  1.
    LinearProgram lp;
    lp.a = (Matrix(2, 2) << 1, 1, 1, 0).finished();
    lp.b = (Vector(2) << 1, 0.3).finished();
    lp.c = (Vector(2) << 1, 1).finished();
    lp.sense = {RowSense::Equal, RowSense::GreaterEqual};
    lp.free_vars = {false, true};
    const auto r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(1.0));
    CHECK(r.x[0] >= 0.3 - 1e-9);
  }
  SUBCASE("infeasible") {
    LinearProgram lp;
    lp.a = (Matrix(2, 1) << 1, 1).finished();
    lp.b = (Vector(2) << 1, 2).finished();
    lp.c = Vector::Ones(1);
    lp.sense = {RowSense::LessEqual, RowSense::GreaterEqual};
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
  }
  SUBCASE("unbounded") {
    LinearProgram lp;
    lp.a = (Matrix(1, 2) << 1, -1).finished();
    lp.b = Vector::Ones(1);
    lp.c = (Vector(2) << 1, 0).finished();
    lp.sense = {RowSense::LessEqual};
    CHECK(solve_lp(lp).status == LpStatus::Unbounded);
  }
}

TEST_CASE("degenerate LP terminates (Beale's cycling example)") {
  LinearProgram lp;
  lp.a = (Matrix(3, 4) << 0.25, -60, -0.04, 9, 0.5, -90, -0.02, 3, 0, 0, 1, 0).finished();
  lp.b = (Vector(3) << 0, 0, 1).finished();
  lp.c = (Vector(4) << 0.75, -150, 0.02, -6).finished();
  lp.sense = {RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual};
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(0.05));
}

TEST_CASE("maximin: closed-form instances") {
  SUBCASE("identity") {
    const auto s = solve_maximin({Matrix::Identity(2, 2), {}});
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.w[0] == doctest::Approx(0.5));
    CHECK(s.t == doctest::Approx(0.5));
  }
  SUBCASE("single column picks the best row") {
    const auto s = solve_maximin({(Matrix(3, 1) << 0.2, 0.7, 0.4).finished(), {}});
    CHECK(s.w[1] == doctest::Approx(1.0));
    CHECK(s.t == doctest::Approx(0.7));
  }
}

TEST_CASE("maximin against the simplex-grid oracle, both LP forms") {
  Rng rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix h = random_matrix(rng, 4, 6);
    const double brute = oracle::maximin_grid(h, 0.01);
    for (LpForm form : {LpForm::Primal, LpForm::Dual}) {
      const auto s = solve_maximin({h, {}}, form);
      REQUIRE(s.status == LpStatus::Optimal);
      check_probability(s.w);
      CHECK(s.t == doctest::Approx((h.transpose() * s.w).minCoeff()).epsilon(1e-9));
      CHECK(s.t >= brute - 1e-9);
      CHECK(s.t <= brute + 0.01);
    }
  }
}

TEST_CASE("strong duality: maximin value equals the minmax value of the mixing LP") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix h = random_matrix(rng, 5, 7) - Matrix::Constant(5, 7, 0.3);
    const auto s = solve_maximin({h, {}});
    const auto d = solve_minmax_measure(h);
    CHECK(std::abs(s.t - d.value) <= 1e-8);
    check_probability(s.mu);
    CHECK((h * s.mu).maxCoeff() == doctest::Approx(s.t).epsilon(1e-8));
  }
}

TEST_CASE("dominated columns and rows do not move the optimum") {
  Rng rng(5);
  const Matrix h = random_matrix(rng, 4, 5);
  const double t0 = solve_maximin({h, {}}).t;
  Matrix more_cols(4, 6);
  more_cols << h, (h.col(0).array() + 1.0).matrix();
  CHECK(std::abs(solve_maximin({more_cols, {}}).t - t0) <= 1e-10);
  Matrix more_rows(5, 5);
  more_rows << h, (h.colwise().minCoeff().array() - 0.5).matrix();
  CHECK(std::abs(solve_maximin({more_rows, {}}).t - t0) <= 1e-10);
}

TEST_CASE("extra weight constraints") {
  WeightConstraint cap{(Vector(2) << 1, 0).finished(), 0.3};
  const auto s = solve_maximin({Matrix::Identity(2, 2), {cap}});
  CHECK(s.w[0] == doctest::Approx(0.3));
  CHECK(s.t == doctest::Approx(0.3));
}

TEST_CASE("minmax measure") {
  SUBCASE("one column") {
    const auto r = solve_minmax_measure((Matrix(3, 1) << -1, 2, 0.5).finished());
    CHECK(r.mu[0] == doctest::Approx(1.0));
    CHECK(r.value == doctest::Approx(2.0));
  }
  SUBCASE("symmetric") {
    const auto r = solve_minmax_measure((Matrix(2, 2) << 1, -1, -1, 1).finished());
    CHECK(r.mu[0] == doctest::Approx(0.5));
    CHECK(std::abs(r.value) <= 1e-12);
  }
  SUBCASE("grid oracle") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix psi = random_matrix(rng, 5, 3) * 2.0 - Matrix::Ones(5, 3);
      const auto r = solve_minmax_measure(psi);
      check_probability(r.mu);
      const double brute = oracle::minmax_grid(psi, 0.01);
      CHECK(r.value <= brute + 1e-9);
      CHECK(r.value >= brute - 0.02);
    }
  }
}

TEST_CASE("deterministic output and text dump") {
  Rng rng(1);
  const Matrix h = random_matrix(rng, 6, 8);
  const auto a = solve_maximin({h, {}});
  const auto b = solve_maximin({h, {}});
  CHECK((a.w - b.w).norm() == 0.0);
  LinearProgram lp;
  lp.a = Matrix::Identity(1, 1);
  lp.b = Vector::Ones(1);
  lp.c = Vector::Ones(1);
  lp.sense = {RowSense::LessEqual};
  CHECK(to_text(lp).find("<=") != std::string::npos);
}
