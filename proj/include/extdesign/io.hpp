#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "extdesign/curvature.hpp"
#include "extdesign/cutting_plane.hpp"
#include "extdesign/design.hpp"
#include "extdesign/estimation.hpp"

namespace extdesign::io {

using nlohmann::json;

/// {"support": [[..], ..], "weights": [..]}
json design_to_json(const DesignMeasure& xi);
/// Validates (and renormalizes within 1e-6) the weights.
DesignMeasure design_from_json(const json& j);
/// One row per support point: x1..xd, weight.
std::string design_to_csv(const DesignMeasure& xi);
/// Two-row display: support points above their weights.
std::string format_design(const DesignMeasure& xi, int precision = 4);

json probe_to_json(const Probe& probe);
json report_to_json(const OptimizationReport& report);
/// Columns k, t, phi, delta.
std::string gap_history_csv(const std::vector<GapRecord>& history);

json observations_to_json(const ObservationSet& obs);
ObservationSet observations_from_json(const json& j);
/// Header row, then columns x1..xd, y. sigma and seed are left at 0.
ObservationSet observations_from_csv(const std::string& text);

json curvature_to_json(const CurvatureReport& c);

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);

/// "a:step:b" expanded inclusively, or a comma-separated list of numbers.
std::vector<double> parse_range(const std::string& spec);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace extdesign::io
