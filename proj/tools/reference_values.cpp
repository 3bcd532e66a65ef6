#include "reference_values.hpp"

#include <cmath>
#include <sstream>

#include "extdesign/io.hpp"

#ifndef EXTDESIGN_DATA_DIR
#define EXTDESIGN_DATA_DIR "data"
#endif

namespace extdesign {

bool ReferenceValue::accepts(double computed) const {
  if (!std::isfinite(computed)) return false;
  const double err = std::abs(computed - value);
  if (abs_tol && err <= *abs_tol) return true;
  if (rel_tol && err <= *rel_tol * std::abs(value)) return true;
  return false;
}

std::string ReferenceValue::tolerance_text() const {
  std::ostringstream os;
  if (rel_tol) os << "+-" << *rel_tol * 100.0 << "%";
  if (rel_tol && abs_tol) os << " or ";
  if (abs_tol) os << "+-" << *abs_tol;
  return os.str();
}

ReferenceValues ReferenceValues::load(const std::string& path) {
  io::json doc;
  try {
    doc = io::json::parse(io::read_text_file(path));
  } catch (const io::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!doc.contains("values") || !doc["values"].is_object()) {
    throw ConfigError(path + ": missing \"values\" object");
  }
  ReferenceValues out;
  for (const auto& [key, e] : doc["values"].items()) {
    ReferenceValue v;
    try {
      v.value = e.at("value").get<double>();
      if (e.contains("rel_tol")) v.rel_tol = e["rel_tol"].get<double>();
      if (e.contains("abs_tol")) v.abs_tol = e["abs_tol"].get<double>();
      v.gate = e.value("gate", true);
      v.source = e.value("source", "");
    } catch (const io::json::exception& ex) {
      throw ConfigError(path + ": entry '" + key + "': " + ex.what());
    }
    if (!v.rel_tol && !v.abs_tol) throw ConfigError(path + ": entry '" + key + "' has no tolerance");
    out.values_.emplace(key, v);
  }
  return out;
}

ReferenceValues ReferenceValues::load_default() {
  return load(std::string(EXTDESIGN_DATA_DIR) + "/reference_values.json");
}

const ReferenceValue& ReferenceValues::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("no reference value '" + key + "'");
  return it->second;
}

}  // namespace extdesign
