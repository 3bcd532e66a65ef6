#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "extdesign/curvature.hpp"
#include "extdesign/cutting_plane.hpp"
#include "extdesign/estimation.hpp"
#include "extdesign/io.hpp"
#include "extdesign/parallel.hpp"
#include "reference_values.hpp"
#include "reproduce.hpp"

namespace extdesign {

namespace {

using io::json;

// Config keys accepted by every subcommand; flags write into the same keys.
const std::set<std::string> kKeys = {
    "model",     "radius",    "criterion", "theta0",         "k",          "worst_case",
    "functional", "theta_box", "theta_set", "xspace",        "eps",        "max_iter",
    "seed",      "grid_n",    "grid_kind", "polish_starts",  "exclusion_radius",
    "w0",        "refine",    "out",       "gap_csv",        "threads",    "design",
    "theta",     "sigma",     "n",         "observations",   "starts",     "lp_form"};

int line_of(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

json load_config(const std::string& path) {
  const std::string text = io::read_text_file(path);
  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError(path + ":1: config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (!kKeys.count(key)) {
      throw ConfigError(path + ":" + std::to_string(line_of(text, key)) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

// A flag value is JSON when it parses as such, else a plain string.
json flag_value(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::parse_error&) {
    return s;
  }
}

Vector numbers(const json& j, const std::string& what) {
  try {
    if (j.is_string()) {
      const auto v = io::parse_range(j.get<std::string>());
      return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    return io::vector_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

class Config {
 public:
  explicit Config(json j) : j_(std::move(j)) {}

  bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }
  const json& get(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing required setting '" + key + "'");
    return j_.at(key);
  }
  template <class T>
  T value(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("setting '" + key + "' has the wrong type");
    }
  }
  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return numbers(v, key)[0];
    throw ConfigError("setting '" + key + "' must be a number");
  }

  RegressionModel model() const {
    ModelOptions mo;
    mo.radius = number("radius", 1.0);
    return builtin_model(value<std::string>("model", ""), mo);
  }

  CriterionSpec spec(const RegressionModel& model) const {
    CriterionSpec s;
    s.kind = parse_criterion_kind(value<std::string>("criterion", "eE"));
    if (has("theta0")) s.theta0 = numbers(get("theta0"), "theta0");
    s.K = number("k", 0.0);
    s.worst_case = value<bool>("worst_case", false);
    if (s.worst_case) s.theta0.reset();
    if (has("functional")) {
      const json& f = get("functional");
      s.functional = f.is_string() && model.name() == "pk1"
                         ? pk1_functional(f.get<std::string>())
                         : linear_functional(numbers(f, "functional"));
    }
    if (has("exclusion_radius")) s.exclusion_radius = number("exclusion_radius", 0.0);
    s.validate(model.num_params());
    return s;
  }

  ParameterDomain domain(int p) const {
    if (has("theta_set")) {
      FiniteSet set;
      for (const auto& t : get("theta_set")) set.points.push_back(numbers(t, "theta_set"));
      if (set.points.empty()) throw ConfigError("theta_set is empty");
      for (const auto& t : set.points) {
        if (t.size() != p) throw ConfigError("theta_set entries must have " + std::to_string(p) + " values");
      }
      return ParameterDomain(set);
    }
    return ParameterDomain(box(p));
  }

  // theta_box: [[lo, hi], ...], {"lower": [...], "upper": [...]}, or "lo:hi,lo:hi".
  Box box(int p) const {
    const json& b = get("theta_box");
    Vector lo(p), hi(p);
    if (b.is_object()) {
      lo = numbers(b.at("lower"), "theta_box.lower");
      hi = numbers(b.at("upper"), "theta_box.upper");
    } else if (b.is_array()) {
      if (static_cast<int>(b.size()) != p) throw ConfigError("theta_box needs one [lo, hi] pair per parameter");
      for (int i = 0; i < p; ++i) {
        const Vector r = numbers(b[static_cast<std::size_t>(i)], "theta_box");
        if (r.size() != 2) throw ConfigError("theta_box entries must be [lo, hi]");
        lo[i] = r[0];
        hi[i] = r[1];
      }
    } else if (b.is_string()) {
      std::stringstream ss(b.get<std::string>());
      std::string part;
      int i = 0;
      while (std::getline(ss, part, ',')) {
        const auto colon = part.find(':');
        if (i >= p || colon == std::string::npos) throw ConfigError("theta_box: expected lo:hi,lo:hi");
        lo[i] = numbers(json(part.substr(0, colon)), "theta_box")[0];
        hi[i] = numbers(json(part.substr(colon + 1)), "theta_box")[0];
        ++i;
      }
      if (i != p) throw ConfigError("theta_box needs one lo:hi pair per parameter");
    } else {
      throw ConfigError("theta_box: unsupported format");
    }
    if (lo.size() != p || hi.size() != p) throw ConfigError("theta_box dimension mismatch");
    if ((hi.array() < lo.array()).any()) throw ConfigError("theta_box: upper bound below lower bound");
    return Box(lo, hi);
  }

  // xspace: "a:step:b", a list of numbers (1-d) or a list of points.
  DesignSpace space(int d) const {
    const json& x = get("xspace");
    DesignSpace s;
    if (x.is_array() && !x.empty() && x[0].is_array()) {
      for (const auto& pt : x) s.push_back(numbers(pt, "xspace"));
    } else {
      const Vector v = numbers(x, "xspace");
      for (Eigen::Index i = 0; i < v.size(); ++i) s.push_back(DesignPoint::Constant(1, v[i]));
    }
    for (const auto& pt : s) {
      if (pt.size() != d) throw ConfigError("xspace points must have dimension " + std::to_string(d));
    }
    return s;
  }

  DesignMeasure design() const {
    const json& d = get("design");
    if (d.is_string()) {
      const std::string path = d.get<std::string>();
      json j;
      try {
        j = json::parse(io::read_text_file(path));
      } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
      }
      if (j.contains("design")) j = j["design"];
      return io::design_from_json(j);
    }
    return io::design_from_json(d);
  }

  SearchOptions search() const {
    SearchOptions s;
    s.grid.seed = static_cast<std::uint64_t>(value<long long>("seed", 20131001));
    s.grid.n_points = value<int>("grid_n", 10000);
    const std::string kind = value<std::string>("grid_kind", "lhs");
    if (kind == "lhs") {
      s.grid.kind = GridKind::LatinHypercube;
    } else if (kind == "full") {
      s.grid.kind = GridKind::FullGrid;
    } else {
      throw ConfigError("grid_kind must be 'lhs' or 'full'");
    }
    if (s.grid.n_points < 1) throw ConfigError("grid_n must be positive");
    s.polish_starts = value<int>("polish_starts", s.polish_starts);
    return s;
  }

  const json& raw() const { return j_; }

 private:
  json j_;
};

void write_json(const std::string& path, const json& j) { io::write_text_file(path, j.dump(2) + "\n"); }

int cmd_optimize(const Config& c, std::ostream& out) {
  const RegressionModel model = c.model();
  const CriterionSpec spec = c.spec(model);
  const ParameterDomain dom = c.domain(model.num_params());
  const DesignSpace space = c.space(model.design_dim());
  OptimizeOptions opts;
  opts.search = c.search();
  opts.eps = c.number("eps", opts.eps);
  opts.max_iter = c.value<int>("max_iter", opts.max_iter);
  if (!(opts.eps > 0.0) || opts.max_iter < 1) throw ConfigError("eps must be positive and max_iter >= 1");
  if (c.has("w0")) opts.w0 = numbers(c.get("w0"), "w0");
  const std::string form = c.value<std::string>("lp_form", "primal");
  if (form == "primal") {
    opts.lp_form = LpForm::Primal;
  } else if (form == "dual") {
    opts.lp_form = LpForm::Dual;
  } else if (form != "auto") {
    throw ConfigError("lp_form must be primal, dual or auto");
  } else {
    opts.lp_form = LpForm::Auto;
  }
  const OptimizationReport rep = c.value<bool>("refine", false)
                                     ? optimize_refined(spec, model, space, dom, opts, RefineOptions{})
                                     : optimize(spec, model, space, dom, opts);
  out << "phi_" << to_string(spec.kind) << " = " << std::setprecision(8) << rep.value
      << "  (upper bound " << rep.upper_bound << ", " << rep.iterations << " iterations)\n";
  out << io::format_design(rep.design);
  if (rep.certificate) out << "certificate " << std::setprecision(4) << rep.certificate->value << "\n";
  write_json(c.value<std::string>("out", "report.json"), io::report_to_json(rep));
  if (c.has("gap_csv")) io::write_text_file(c.value<std::string>("gap_csv", ""), io::gap_history_csv(rep.gap_history));
  if (!rep.converged) {
    out << "not converged after " << rep.iterations << " iterations\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_evaluate(const Config& c, std::ostream& out) {
  const RegressionModel model = c.model();
  const CriterionSpec spec = c.spec(model);
  const DesignMeasure xi = c.design();
  json result;
  double value = 0.0;
  if (is_extended(spec.kind)) {
    const DesignSpace space = c.has("xspace") ? c.space(model.design_dim()) : DesignSpace{};
    const CriterionValue v = evaluate_phi(spec, model, xi, c.domain(model.num_params()), c.search(), space);
    value = v.value;
    result["argmin"] = io::probe_to_json(v.argmin);
    result["near_boundary"] = v.near_boundary;
    if (v.argmin_x) result["argmin_x"] = io::vector_to_json(*v.argmin_x);
  } else {
    if (!spec.theta0) throw ConfigError("classical criteria need theta0");
    const DesignSpace space = c.has("xspace") ? c.space(model.design_dim()) : DesignSpace{};
    value = classical_value(spec.kind, model, xi, *spec.theta0,
                            spec.functional ? &*spec.functional : nullptr, space);
  }
  result["criterion"] = to_string(spec.kind);
  result["value"] = value;
  out << "phi_" << to_string(spec.kind) << " = " << std::setprecision(10) << value << "\n";
  if (c.has("out")) write_json(c.value<std::string>("out", ""), result);
  return kExitOk;
}

int cmd_certify(const Config& c, std::ostream& out) {
  const RegressionModel model = c.model();
  const CriterionSpec spec = c.spec(model);
  const DesignMeasure xi = c.design();
  const DesignSpace space = c.space(model.design_dim());
  const ActiveSet active = active_set(spec, model, xi, c.domain(model.num_params()), c.search(), space);
  const Certificate cert = optimality_certificate(spec, model, xi, space, active);
  out << "phi_" << to_string(spec.kind) << " = " << std::setprecision(8) << active.phi << "\n"
      << "active points " << active.points.size() << "\n"
      << "certificate " << cert.value << "\n";
  if (c.has("out")) {
    json pts = json::array();
    for (const auto& p : active.points) pts.push_back(io::probe_to_json(p));
    write_json(c.value<std::string>("out", ""),
               json{{"phi", active.phi}, {"certificate", cert.value}, {"mu", io::vector_to_json(cert.mu)},
                    {"active_set", pts}, {"active_tolerance", active.tolerance}});
  }
  return kExitOk;
}

int cmd_curvature(const Config& c, std::ostream& out) {
  const RegressionModel model = c.model();
  if (!c.has("theta0") && !c.has("theta")) throw ConfigError("curvature needs theta0");
  const Vector theta = numbers(c.has("theta") ? c.get("theta") : c.get("theta0"), "theta");
  const CurvatureReport r = curvature_measures(model, c.design(), theta);
  out << "C_par " << std::setprecision(6) << r.C_par << "\nC_int " << r.C_int << "\nC_tot " << r.C_tot << "\n";
  if (c.has("out")) write_json(c.value<std::string>("out", ""), io::curvature_to_json(r));
  return kExitOk;
}

int cmd_simulate(const Config& c, std::ostream& out) {
  const RegressionModel model = c.model();
  const Vector theta = numbers(c.get("theta"), "theta");
  const double sigma = c.number("sigma", 0.0);
  const DesignMeasure xi = c.design();
  const int n = c.value<int>("n", static_cast<int>(xi.size()));
  if (n < 1) throw ConfigError("n must be positive");
  const ObservationSet obs = simulate_observations(model, replicate_design(xi, n), theta, sigma,
                                                   static_cast<std::uint64_t>(c.value<long long>("seed", 20131001)));
  const json j = io::observations_to_json(obs);
  if (c.has("out")) {
    write_json(c.value<std::string>("out", ""), j);
    out << obs.size() << " observations written\n";
  } else {
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_fit(const Config& c, std::ostream& out) {
  const RegressionModel model = c.model();
  const std::string path = c.value<std::string>("observations", "");
  if (path.empty()) throw ConfigError("missing required setting 'observations'");
  ObservationSet obs;
  if (std::filesystem::path(path).extension() == ".csv") {
    obs = io::observations_from_csv(io::read_text_file(path));
  } else {
    try {
      obs = io::observations_from_json(json::parse(io::read_text_file(path)));
    } catch (const json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  FitOptions fo;
  fo.starts = c.value<int>("starts", fo.starts);
  fo.seed = static_cast<std::uint64_t>(c.value<long long>("seed", 20131001));
  const FitResult fit = ls_fit_multistart(model, obs, c.box(model.num_params()), fo);
  out << "theta_hat " << std::setprecision(8) << fit.theta.transpose() << "\nresidual " << fit.residual
      << "\nlocal minima " << fit.local_minima.size() << "\n";
  json minima = json::array();
  for (const auto& m : fit.local_minima) {
    minima.push_back(json{{"theta", io::vector_to_json(m.theta)}, {"residual", m.residual}, {"hits", m.hits}});
  }
  if (c.has("out")) {
    write_json(c.value<std::string>("out", ""),
               json{{"theta", io::vector_to_json(fit.theta)}, {"residual", fit.residual}, {"local_minima", minima}});
  }
  return kExitOk;
}

int cmd_reproduce(const std::vector<std::string>& ids, const std::string& out_dir, std::uint64_t seed,
                  std::ostream& out) {
  const ReferenceValues refs = ReferenceValues::load_default();
  ReproduceOptions ro;
  ro.seed = seed;
  ro.out_dir = out_dir;
  ro.log = &out;
  int code = kExitOk;
  for (const auto& id : ids) {
    const ReproduceResult r = reproduce(id, ro, refs);
    print_comparisons(out, r);
    out << "[" << id << "] " << (r.gated_pass() ? "all checks pass" : "some checks FAIL")
        << (r.converged ? "" : " (not converged)") << ", " << std::setprecision(3) << r.wall_time << " s\n";
    code = std::max(code, reproduce_exit_code(r));
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extended optimality criteria for nonlinear regression designs", "extdesign"};
  app.require_subcommand(1);

  std::map<std::string, std::string> flags;
  std::string config_path;
  int threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    for (const char* name : {"model", "criterion", "theta0", "theta-box", "xspace", "eps", "seed", "k",
                             "grid-n", "out", "design", "functional", "theta-set", "max-iter",
                             "radius", "w0", "gap-csv", "theta", "sigma", "n", "observations",
                             "starts", "lp-form", "polish-starts", "exclusion-radius"}) {
      sub->add_option_function<std::string>(std::string("--") + name,
                                            [&flags, name](const std::string& v) { flags[name] = v; });
    }
    sub->add_flag_function("--worst-case", [&flags](std::int64_t) { flags["worst-case"] = "true"; });
    sub->add_flag_function("--refine", [&flags](std::int64_t) { flags["refine"] = "true"; });
    sub->add_option("--threads", threads, "cap on worker threads (0 = all cores)");
  };
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"optimize", "evaluate", "certify", "curvature", "simulate", "fit"}) {
    subs[name] = app.add_subcommand(name);
    add_common(subs[name]);
  }
  subs["optimize"]->description("optimal design by the cutting-plane method");
  subs["evaluate"]->description("criterion value of a design");
  subs["certify"]->description("active set and equivalence-theorem certificate of a design");
  subs["curvature"]->description("parametric, intrinsic and total curvature of a design");
  subs["simulate"]->description("simulated observations on a design");
  subs["fit"]->description("multistart least squares");

  CLI::App* rep = app.add_subcommand("reproduce", "rerun a worked example and compare with reference values");
  std::vector<std::string> examples;
  std::string rep_out = "results";
  std::uint64_t rep_seed = 20131001;
  rep->add_option("examples", examples, "ex1 ex2 ex3 ex4 or all")->required();
  rep->add_option("--out", rep_out, "output directory");
  rep->add_option("--seed", rep_seed, "grid seed");
  rep->add_option("--threads", threads, "cap on worker threads (0 = all cores)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    set_max_threads(threads < 0 ? 0u : static_cast<unsigned>(threads));
    if (rep->parsed()) {
      std::vector<std::string> ids;
      for (const auto& e : examples) {
        if (e == "all") {
          ids.insert(ids.end(), {"ex1", "ex2", "ex3", "ex4"});
        } else {
          ids.push_back(e);
        }
      }
      return cmd_reproduce(ids, rep_out, rep_seed, out);
    }
    json cfg = config_path.empty() ? json::object() : load_config(config_path);
    for (const auto& [name, v] : flags) {
      std::string key = name;
      std::replace(key.begin(), key.end(), '-', '_');
      cfg[key] = flag_value(v);
    }
    const Config c(cfg);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "optimize") return cmd_optimize(c, out);
    if (cmd == "evaluate") return cmd_evaluate(c, out);
    if (cmd == "certify") return cmd_certify(c, out);
    if (cmd == "curvature") return cmd_curvature(c, out);
    if (cmd == "simulate") return cmd_simulate(c, out);
    return cmd_fit(c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RegistryError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CriterionError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DesignError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ModelError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace extdesign
