#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "extdesign/cutting_plane.hpp"
#include "reference_values.hpp"

namespace extdesign {

struct Comparison {
  std::string key;
  double computed = 0.0;
  ReferenceValue reference;
  bool pass = false;
};

/// Criterion values of named designs: rows are designs, columns quantities.
/// NaN marks an empty cell.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  std::vector<std::vector<double>> values;

  void add_row(const std::string& name, std::vector<double> row);
  double at(const std::string& row, const std::string& column) const;
  std::string to_csv() const;
};

struct ReproduceOptions {
  std::uint64_t seed = 20131001;
  /// Empty: nothing is written.
  std::string out_dir;
  /// Progress messages; may be null.
  std::ostream* log = nullptr;
};

struct ReproduceResult {
  std::string example;
  std::vector<Comparison> comparisons;
  std::map<std::string, OptimizationReport> reports;
  std::map<std::string, DesignMeasure> designs;
  Table table;
  bool converged = true;
  double wall_time = 0.0;
  std::vector<std::string> files;

  bool gated_pass() const;
  /// Computed value of a compared key; throws when absent.
  double value(const std::string& key) const;
  const Comparison& comparison(const std::string& key) const;
};

/// Runs one worked example ("ex1".."ex4"): optimal designs, criterion and
/// curvature tables, and the comparison against the reference values.
ReproduceResult reproduce(const std::string& example, const ReproduceOptions& options,
                          const ReferenceValues& refs);

/// Human-readable comparison listing.
void print_comparisons(std::ostream& os, const ReproduceResult& result);

/// 0 when every gated comparison passes, 2 otherwise (or on non-convergence).
int reproduce_exit_code(const ReproduceResult& result);

}  // namespace extdesign
