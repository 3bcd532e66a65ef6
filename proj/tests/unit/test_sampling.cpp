#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>

#include "extdesign/local_search.hpp"
#include "extdesign/parallel.hpp"
#include "extdesign/sampling.hpp"

using namespace extdesign;

TEST_CASE("LHS: one point per stratum in every coordinate") {
  const Box unit(Vector::Zero(1), Vector::Ones(1));
  const auto pts = lhs_sample(unit, 4, 99);
  std::vector<double> v;
  for (const auto& p : pts) v.push_back(p[0]);
  std::sort(v.begin(), v.end());
  for (int i = 0; i < 4; ++i) {
    CHECK(v[static_cast<std::size_t>(i)] >= i / 4.0);
    CHECK(v[static_cast<std::size_t>(i)] < (i + 1) / 4.0);
  }

  const Box box((Vector(3) << 16, 0.03, 3).finished(), (Vector(3) << 27, 0.08, 6).finished());
  const int n = 500;
  const auto many = lhs_sample(box, n, 5);
  REQUIRE(many.size() == static_cast<std::size_t>(n));
  for (int k = 0; k < 3; ++k) {
    std::set<int> strata;
    for (const auto& p : many) {
      CHECK(box.contains(p));
      const double u = (p[k] - box.lower[k]) / (box.upper[k] - box.lower[k]);
      strata.insert(static_cast<int>(std::floor(u * n)));
    }
    CHECK(strata.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("LHS is deterministic in the seed") {
  const Box box(Vector::Zero(2), Vector::Ones(2));
  const auto a = lhs_sample(box, 50, 20131001);
  const auto b = lhs_sample(box, 50, 20131001);
  const auto c = lhs_sample(box, 50, 20131002);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && (a[i] - b[i]).norm() == 0.0;
    differ = differ || (a[i] - c[i]).norm() > 0.0;
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("full grid and explicit grids") {
  const Box box(Vector::Zero(2), Vector::Ones(2));
  const auto g = full_grid(box, 25);
  CHECK(g.size() == 25);
  GridSpec spec;
  spec.kind = GridKind::Explicit;
  spec.points = {Vector::Constant(2, 0.5)};
  CHECK(make_grid(box, spec).size() == 1);
}

TEST_CASE("box helpers") {
  const Box box((Vector(2) << -3, -2).finished(), (Vector(2) << 4, 2).finished());
  CHECK(box.diameter() == doctest::Approx(std::sqrt(49.0 + 16.0)));
  const Vector v = (Vector(2) << 0.5, 1.0).finished();
  CHECK((box.from_unit(box.to_unit(v)) - v).norm() <= 1e-15);
  CHECK(box.clamp((Vector(2) << 9, -9).finished())[0] == 4.0);
  CHECK_THROWS(Box((Vector(1) << 1).finished(), (Vector(1) << 0).finished()));
}

TEST_CASE("normal draws: mean and variance") {
  Rng rng(123);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) <= 3.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("bound-constrained descent") {
  const Box box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  SUBCASE("interior minimum") {
    auto f = [](const Vector& x) { return std::pow(x[0] - 0.3, 2) + 10 * std::pow(x[1] + 0.2, 2); };
    const auto r = minimize_in_box(f, box, Vector::Zero(2));
    CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(-0.2).epsilon(1e-5));
  }
  SUBCASE("minimum on the boundary") {
    auto f = [](const Vector& x) { return std::pow(x[0] - 3.0, 2) + std::pow(x[1], 2); };
    const auto r = minimize_in_box(f, box, Vector::Zero(2));
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(std::abs(r.x[1]) <= 1e-6);
  }
  SUBCASE("start at the minimizer stays put") {
    auto f = [](const Vector& x) { return std::pow(x[0] - 0.25, 2) + std::pow(x[1] - 0.5, 2); };
    const Vector x0 = (Vector(2) << 0.25, 0.5).finished();
    const auto r = minimize_in_box(f, box, x0);
    CHECK((r.x - x0).norm() <= 1e-8);
  }
  SUBCASE("never worse than the start") {
    auto f = [](const Vector& x) { return std::sin(13 * x[0]) * std::cos(7 * x[1]); };
    const Vector x0 = (Vector(2) << 0.1, -0.4).finished();
    CHECK(minimize_in_box(f, box, x0).f <= f(x0));
  }
}

TEST_CASE("parallel map visits each index once regardless of the thread cap") {
  for (unsigned t : {1u, 3u, 0u}) {
    set_max_threads(t);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    bool ok = true;
    for (auto& h : hits) ok = ok && h.load() == 1;
    CHECK(ok);
  }
  set_max_threads(0);
}
