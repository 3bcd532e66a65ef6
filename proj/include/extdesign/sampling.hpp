#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "extdesign/common.hpp"

namespace extdesign {

/// Axis-aligned parameter box.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi);

  int dim() const { return static_cast<int>(lower.size()); }
  double diameter() const { return (upper - lower).norm(); }
  bool contains(const Vector& v, double tol = 0.0) const;
  Vector clamp(const Vector& v) const;
  /// Maps the unit cube onto the box.
  Vector from_unit(const Vector& u) const;
  Vector to_unit(const Vector& v) const;
};

/// Finite, duplicate-free list of parameter vectors.
struct FiniteSet {
  std::vector<ParameterVector> points;
};

/// Admissible parameter set: a box or a finite set.
class ParameterDomain {
 public:
  ParameterDomain(Box box);
  ParameterDomain(FiniteSet set);

  bool is_box() const { return std::holds_alternative<Box>(value_); }
  const Box& box() const { return std::get<Box>(value_); }
  const FiniteSet& finite_set() const { return std::get<FiniteSet>(value_); }
  int dim() const;
  double diameter() const;

 private:
  std::variant<Box, FiniteSet> value_;
};

enum class GridKind { LatinHypercube, FullGrid, Explicit };

/// Space-filling grid over a box.
struct GridSpec {
  GridKind kind = GridKind::LatinHypercube;
  int n_points = 10000;
  std::uint64_t seed = 20131001;
  /// Used when kind == Explicit.
  std::vector<ParameterVector> points;
};

/// Deterministic generator: 64-bit Mersenne twister with hand-rolled
/// conversions so that draws do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for the i-th independent stream derived from a base seed.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index);

/// Latin hypercube sample of n points in the box: each coordinate takes one
/// value in each of the n equal strata of its range.
std::vector<ParameterVector> lhs_sample(const Box& box, int n, std::uint64_t seed);

/// Full factorial grid with about n points (k = round(n^(1/p)) levels per axis, k >= 2).
std::vector<ParameterVector> full_grid(const Box& box, int n);

/// Points of the grid described by spec over the box.
std::vector<ParameterVector> make_grid(const Box& box, const GridSpec& spec);

}  // namespace extdesign
