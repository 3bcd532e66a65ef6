#pragma once

#include <map>
#include <optional>
#include <string>

namespace extdesign {

struct ReferenceValue {
  double value = 0.0;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  /// Gated values decide the exit status of a reproduction; the others are
  /// printed for information only.
  bool gate = true;
  std::string source;

  /// |computed - value| within abs_tol, or within rel_tol * |value|.
  bool accepts(double computed) const;
  std::string tolerance_text() const;
};

class ReferenceValues {
 public:
  static ReferenceValues load(const std::string& path);
  /// data/reference_values.json of the source tree.
  static ReferenceValues load_default();

  const ReferenceValue& at(const std::string& key) const;
  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, ReferenceValue>& all() const { return values_; }

 private:
  std::map<std::string, ReferenceValue> values_;
};

}  // namespace extdesign
