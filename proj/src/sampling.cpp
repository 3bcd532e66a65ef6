#include "extdesign/sampling.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace extdesign {

Box::Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw CriterionError("box: bound vectors must have the same positive dimension");
  }
  if (!lower.allFinite() || !upper.allFinite()) throw CriterionError("box: non-finite bounds");
  if ((lower.array() > upper.array()).any()) throw CriterionError("box: lower > upper");
}

bool Box::contains(const Vector& v, double tol) const {
  return v.size() == lower.size() && (v.array() >= lower.array() - tol).all() &&
         (v.array() <= upper.array() + tol).all();
}

Vector Box::clamp(const Vector& v) const { return v.cwiseMax(lower).cwiseMin(upper); }

Vector Box::from_unit(const Vector& u) const {
  return lower + (upper - lower).cwiseProduct(u);
}

Vector Box::to_unit(const Vector& v) const {
  Vector u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double w = upper[i] - lower[i];
    u[i] = w > 0.0 ? (v[i] - lower[i]) / w : 0.0;
  }
  return u;
}

ParameterDomain::ParameterDomain(Box box) : value_(std::move(box)) {}

ParameterDomain::ParameterDomain(FiniteSet set) : value_(std::move(set)) {
  const auto& pts = std::get<FiniteSet>(value_).points;
  if (pts.empty()) throw CriterionError("parameter set: finite set is empty");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].size() != pts[0].size()) throw CriterionError("parameter set: mixed dimensions");
    if (!pts[i].allFinite()) throw CriterionError("parameter set: non-finite member");
    for (std::size_t j = 0; j < i; ++j) {
      if (pts[i] == pts[j]) {
        throw CriterionError("parameter set: duplicate member at index " + std::to_string(i));
      }
    }
  }
}

int ParameterDomain::dim() const {
  return is_box() ? box().dim() : static_cast<int>(finite_set().points.front().size());
}

double ParameterDomain::diameter() const {
  if (is_box()) return box().diameter();
  const auto& pts = finite_set().points;
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  }
  return d;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<ParameterVector> lhs_sample(const Box& box, int n, std::uint64_t seed) {
  if (n < 1) throw CriterionError("lhs_sample: n must be >= 1");
  const int p = box.dim();
  Rng rng(seed);
  std::vector<ParameterVector> pts(static_cast<std::size_t>(n), ParameterVector(p));
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int k = 0; k < p; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    const double lo = box.lower[k];
    const double width = box.upper[k] - box.lower[k];
    for (int i = 0; i < n; ++i) {
      const double u = (perm[static_cast<std::size_t>(i)] + rng.uniform()) / n;
      pts[static_cast<std::size_t>(i)][k] = lo + width * u;
    }
  }
  return pts;
}

std::vector<ParameterVector> full_grid(const Box& box, int n) {
  const int p = box.dim();
  const int levels = std::max(2, static_cast<int>(std::lround(std::pow(n, 1.0 / p))));
  std::size_t total = 1;
  for (int k = 0; k < p; ++k) total *= static_cast<std::size_t>(levels);
  std::vector<ParameterVector> pts;
  pts.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ParameterVector v(p);
    std::size_t rem = idx;
    for (int k = 0; k < p; ++k) {
      const auto level = static_cast<double>(rem % static_cast<std::size_t>(levels));
      rem /= static_cast<std::size_t>(levels);
      v[k] = box.lower[k] + (box.upper[k] - box.lower[k]) * level / (levels - 1);
    }
    pts.push_back(std::move(v));
  }
  return pts;
}

std::vector<ParameterVector> make_grid(const Box& box, const GridSpec& spec) {
  switch (spec.kind) {
    case GridKind::LatinHypercube:
      return lhs_sample(box, spec.n_points, spec.seed);
    case GridKind::FullGrid:
      return full_grid(box, spec.n_points);
    case GridKind::Explicit:
      if (spec.points.empty()) throw CriterionError("explicit grid: no points given");
      return spec.points;
  }
  return {};
}

}  // namespace extdesign
