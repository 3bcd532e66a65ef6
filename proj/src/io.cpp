#include "extdesign/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace extdesign::io {

namespace {

std::string format_number(double v, int precision) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

}  // namespace

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from_json(const json& j) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array()) throw ConfigError("expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json design_to_json(const DesignMeasure& xi) {
  json support = json::array();
  for (const auto& x : xi.support()) support.push_back(vector_to_json(x));
  return json{{"support", support}, {"weights", vector_to_json(xi.weights())}};
}

DesignMeasure design_from_json(const json& j) {
  if (!j.is_object() || !j.contains("support") || !j.contains("weights")) {
    throw ConfigError("design JSON needs \"support\" and \"weights\"");
  }
  std::vector<DesignPoint> support;
  for (const auto& p : j.at("support")) support.push_back(vector_from_json(p));
  const Vector w = vector_from_json(j.at("weights"));
  if (std::abs(w.sum() - 1.0) > 1e-6) throw DesignError("design weights must sum to 1");
  ValidateOptions opts;
  opts.renormalize = true;
  return validate_design(support, w, opts);
}

std::string design_to_csv(const DesignMeasure& xi) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto d = xi.size() ? xi.point(0).size() : 0;
  for (Eigen::Index k = 0; k < d; ++k) os << "x" << k + 1 << ",";
  os << "weight\n";
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) os << xi.point(i)[k] << ",";
    os << xi.weight(i) << "\n";
  }
  return os.str();
}

std::string format_design(const DesignMeasure& xi, int precision) {
  std::vector<std::string> top, bottom;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const auto& x = xi.point(i);
    std::string cell;
    if (x.size() == 1) {
      cell = format_number(x[0], precision);
    } else {
      cell = "(";
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        cell += (k ? "," : "") + format_number(x[k], precision);
      }
      cell += ")";
    }
    top.push_back(cell);
    bottom.push_back(format_number(xi.weight(i), precision));
  }
  std::ostringstream a, b;
  for (std::size_t i = 0; i < top.size(); ++i) {
    const auto width = static_cast<int>(std::max(top[i].size(), bottom[i].size())) + 2;
    a << std::setw(width) << top[i];
    b << std::setw(width) << bottom[i];
  }
  return a.str() + "\n" + b.str() + "\n";
}

json probe_to_json(const Probe& probe) {
  json j{{"theta", vector_to_json(probe.theta)}, {"theta0", vector_to_json(probe.theta0)}};
  if (probe.direction) j["direction"] = vector_to_json(*probe.direction);
  return j;
}

json report_to_json(const OptimizationReport& report) {
  json gaps = json::array();
  for (const auto& g : report.gap_history) {
    gaps.push_back(json{{"k", g.k}, {"t", g.t}, {"phi", g.phi}, {"delta", g.delta}});
  }
  json cuts = json::array();
  for (const auto& c : report.cuts) cuts.push_back(probe_to_json(c));
  json cert = nullptr;
  if (report.certificate) {
    cert = json{{"value", report.certificate->value},
                {"mu", vector_to_json(report.certificate->mu)}};
    if (report.active) {
      json pts = json::array();
      for (const auto& p : report.active->points) pts.push_back(probe_to_json(p));
      cert["active_set"] = pts;
      cert["active_tolerance"] = report.active->tolerance;
    }
  }
  return json{{"design", design_to_json(report.design)},
              {"value", report.value},
              {"upper_bound", report.upper_bound},
              {"converged", report.converged},
              {"iterations", report.iterations},
              {"gap_history", gaps},
              {"cuts", cuts},
              {"certificate", cert},
              {"seeds", json{{"grid", report.seed}}},
              {"timing", json{{"wall_seconds", report.wall_time}}}};
}

std::string gap_history_csv(const std::vector<GapRecord>& history) {
  std::ostringstream os;
  os << std::setprecision(17) << "k,t,phi,delta\n";
  for (const auto& g : history) os << g.k << "," << g.t << "," << g.phi << "," << g.delta << "\n";
  return os.str();
}

json observations_to_json(const ObservationSet& obs) {
  json x = json::array();
  for (const auto& p : obs.x) x.push_back(p.size() == 1 ? json(p[0]) : vector_to_json(p));
  return json{{"x", x}, {"y", vector_to_json(obs.y)}, {"sigma", obs.sigma}, {"seed", obs.seed}};
}

ObservationSet observations_from_json(const json& j) {
  if (!j.is_object() || !j.contains("x") || !j.contains("y")) {
    throw ConfigError("observation JSON needs \"x\" and \"y\"");
  }
  ObservationSet obs;
  for (const auto& p : j.at("x")) obs.x.push_back(vector_from_json(p));
  obs.y = vector_from_json(j.at("y"));
  obs.sigma = j.value("sigma", 0.0);
  obs.seed = j.value("seed", std::uint64_t{0});
  obs.validate();
  return obs;
}

ObservationSet observations_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("observation CSV is empty");
  const auto cols = split(line, ',').size();
  if (cols < 2) throw ConfigError("observation CSV needs columns x..., y");
  ObservationSet obs;
  std::vector<double> y;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split(line, ',');
    if (cells.size() != cols) {
      throw ConfigError("observation CSV line " + std::to_string(lineno) + ": expected " +
                        std::to_string(cols) + " columns");
    }
    DesignPoint x(static_cast<Eigen::Index>(cols - 1));
    for (std::size_t k = 0; k + 1 < cols; ++k) x[static_cast<Eigen::Index>(k)] = to_double(cells[k]);
    obs.x.push_back(x);
    y.push_back(to_double(cells.back()));
  }
  obs.y = Eigen::Map<Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  return obs;
}

json curvature_to_json(const CurvatureReport& c) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json("inf"); };
  json j{{"C_par", num(c.C_par)}, {"C_int", num(c.C_int)}, {"C_tot", num(c.C_tot)},
         {"singular", c.singular}};
  if (!c.singular) {
    j["u_par"] = vector_to_json(c.u_par);
    j["u_int"] = vector_to_json(c.u_int);
    j["u_tot"] = vector_to_json(c.u_tot);
  }
  return j;
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> out;
  const auto parts = split(spec, ':');
  if (parts.size() == 3) {
    const double a = to_double(parts[0]);
    const double step = to_double(parts[1]);
    const double b = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw ConfigError("bad range '" + spec + "'");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    if (n > 10000000) throw ConfigError("range '" + spec + "' is too long");
    for (long i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  if (parts.size() != 1) throw ConfigError("bad range '" + spec + "' (expected a:step:b)");
  for (const auto& cell : split(spec, ',')) out.push_back(to_double(cell));
  if (out.empty()) throw ConfigError("empty list '" + spec + "'");
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace extdesign::io
