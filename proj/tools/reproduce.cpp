#include "reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "examples.hpp"
#include "extdesign/curvature.hpp"
#include "extdesign/io.hpp"

namespace extdesign {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

io::json cell_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

class Run {
 public:
  Run(std::string example, const ReproduceOptions& options, const ReferenceValues& refs)
      : options_(options), refs_(refs), start_(std::chrono::steady_clock::now()) {
    result_.example = std::move(example);
  }

  void log(const std::string& msg) const {
    if (options_.log) *options_.log << "[" << result_.example << "] " << msg << std::endl;
  }

  void compare(const std::string& key, double computed) {
    const std::string full = result_.example + "." + key;
    if (!refs_.contains(full)) return;
    const ReferenceValue& ref = refs_.at(full);
    result_.comparisons.push_back(Comparison{full, computed, ref, ref.accepts(computed)});
  }

  void compare_table() {
    const Table& t = result_.table;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (!std::isnan(t.values[r][c])) compare(t.rows[r] + "." + t.columns[c], t.values[r][c]);
      }
    }
  }

  // Support points in increasing order of the first coordinate, with weights.
  void compare_support(const std::string& name, const DesignMeasure& xi) {
    std::vector<std::size_t> order(xi.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xi.point(a)[0] < xi.point(b)[0]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::string idx = std::to_string(k + 1);
      compare(name + ".x" + idx, xi.point(order[k])[0]);
      compare(name + ".w" + idx, xi.weight(order[k]));
    }
    // A published support point with no computed counterpart fails outright.
    for (std::size_t k = xi.size() + 1; refs_.contains(result_.example + "." + name + ".x" + std::to_string(k)); ++k) {
      compare(name + ".x" + std::to_string(k), kNaN);
    }
  }

  void add_report(const std::string& name, const OptimizationReport& rep) {
    if (!rep.converged) result_.converged = false;
    std::ostringstream os;
    os << name << ": value " << std::setprecision(6) << rep.value << ", " << rep.iterations
       << " iterations, " << std::setprecision(3) << rep.wall_time << " s";
    if (rep.certificate) os << ", certificate " << std::setprecision(3) << rep.certificate->value;
    log(os.str());
    result_.reports.emplace(name, rep);
    result_.designs.emplace(name, rep.design);
  }

  void write(const std::string& file, const std::string& text) {
    if (options_.out_dir.empty()) return;
    std::filesystem::create_directories(options_.out_dir);
    const auto path = (std::filesystem::path(options_.out_dir) / file).string();
    io::write_text_file(path, text);
    result_.files.push_back(path);
  }

  ReproduceResult finish() {
    compare_table();
    result_.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (!options_.out_dir.empty()) {
      const std::string ex = result_.example;
      for (const auto& [name, rep] : result_.reports) {
        write(ex + "_" + name + "_report.json", io::report_to_json(rep).dump(2) + "\n");
        write(ex + "_" + name + "_gap.csv", io::gap_history_csv(rep.gap_history));
      }
      io::json designs = io::json::object();
      for (const auto& [name, xi] : result_.designs) designs[name] = io::design_to_json(xi);
      write(ex + "_designs.json", designs.dump(2) + "\n");
      if (!result_.table.rows.empty()) {
        write(ex + "_table.csv", result_.table.to_csv());
        io::json t = io::json::object();
        for (std::size_t r = 0; r < result_.table.rows.size(); ++r) {
          io::json row = io::json::object();
          for (std::size_t c = 0; c < result_.table.columns.size(); ++c) {
            row[result_.table.columns[c]] = cell_json(result_.table.values[r][c]);
          }
          t[result_.table.rows[r]] = row;
        }
        write(ex + "_table.json", t.dump(2) + "\n");
      }
      std::ostringstream csv;
      csv << std::setprecision(10) << "key,computed,reference,tolerance,gate,pass\n";
      io::json cj = io::json::array();
      for (const auto& c : result_.comparisons) {
        csv << c.key << "," << cell(c.computed) << "," << c.reference.value << ","
            << c.reference.tolerance_text() << "," << (c.reference.gate ? 1 : 0) << ","
            << (c.pass ? 1 : 0) << "\n";
        cj.push_back({{"key", c.key}, {"computed", cell_json(c.computed)},
                      {"reference", c.reference.value}, {"tolerance", c.reference.tolerance_text()},
                      {"gate", c.reference.gate}, {"pass", c.pass}, {"source", c.reference.source}});
      }
      write(ex + "_comparison.csv", csv.str());
      write(ex + "_comparison.json", cj.dump(2) + "\n");
    }
    return std::move(result_);
  }

  ReproduceResult& result() { return result_; }
  const ReproduceOptions& options() const { return options_; }

 private:
  ReproduceOptions options_;
  const ReferenceValues& refs_;
  std::chrono::steady_clock::time_point start_;
  ReproduceResult result_;
};

SearchOptions search_with(std::uint64_t seed, int n_points) {
  SearchOptions s;
  s.grid.seed = seed;
  s.grid.n_points = n_points;
  return s;
}

double det13(const RegressionModel& model, const DesignMeasure& xi, const ParameterVector& theta0) {
  const double d = classical_value(CriterionKind::D, model, xi, theta0);
  return std::cbrt(std::pow(d, model.num_params()));
}

std::vector<double> curvature_cells(const RegressionModel& model, const DesignMeasure& xi,
                                    const ParameterVector& theta0) {
  const CurvatureReport c = curvature_measures(model, xi, theta0);
  if (c.singular) return {kNaN, kNaN, kNaN};
  return {c.C_par, c.C_int, c.C_tot};
}

ReproduceResult run_ex1(Run& run) {
  const RegressionModel model = circle_model(1.0);
  CriterionSpec spec;
  spec.kind = CriterionKind::eE;
  spec.theta0 = Vector::Zero(1);
  const ParameterDomain dom(Box(Vector::Zero(1), Vector::Ones(1)));
  const SearchOptions search = search_with(run.options().seed, 1000);

  std::ostringstream csv;
  csv << std::setprecision(10) << "u,phi_eE,argmin_theta\n";
  const double u_max = 7.0 * std::numbers::pi / 4.0;
  double best_u = 0.0, best_phi = -1.0;
  for (int i = 0; 0.01 * i <= u_max + 1e-12; ++i) {
    const double u = 0.01 * i;
    const CriterionValue v = evaluate_phi(spec, model, examples::circle_design(u), dom, search);
    csv << u << "," << v.value << "," << v.argmin.theta[0] << "\n";
    if (v.value > best_phi) {
      best_phi = v.value;
      best_u = u;
    }
  }
  run.write("ex1_sweep.csv", csv.str());
  const CriterionValue at_pi =
      evaluate_phi(spec, model, examples::circle_design(std::numbers::pi), dom, search);
  run.log("argmax u = " + cell(best_u) + ", phi_eE(pi) = " + cell(at_pi.value));
  run.compare("u_star", best_u);
  run.compare("phi_eE_at_pi", at_pi.value);
  run.compare("argmin_at_pi", at_pi.argmin.theta[0]);
  return run.finish();
}

ReproduceResult run_ex2(Run& run) {
  const examples::Setup ex = examples::example2();
  const ParameterDomain dom = ex.domain();
  OptimizeOptions opts;
  opts.search = search_with(run.options().seed, 10000);
  const CriterionSpec eE = ex.spec(CriterionKind::eE);
  const CriterionSpec eG = ex.spec(CriterionKind::eG);

  const OptimizationReport rep_eE = optimize(eE, ex.model, ex.space, dom, opts);
  run.add_report("xi_eE", rep_eE);
  const OptimizationReport rep_eG = optimize(eG, ex.model, ex.space, dom, opts);
  run.add_report("xi_eG", rep_eG);
  for (std::size_t i = 0; i < ex.space.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    run.compare("xi_eE.w" + std::to_string(i + 1), rep_eE.weights[k]);
    run.compare("xi_eG.w" + std::to_string(i + 1), rep_eG.weights[k]);
  }

  Table& t = run.result().table;
  t.columns = {"det13", "lambda_min", "phi_eE", "phi_eG", "C_par", "C_int", "C_tot"};
  std::vector<std::pair<std::string, DesignMeasure>> rows = ex.designs;
  rows.emplace_back("xi_eE", rep_eE.design);
  rows.emplace_back("xi_eG", rep_eG.design);
  for (const auto& [name, xi] : rows) {
    const CriterionValue ve = evaluate_phi(eE, ex.model, xi, dom, opts.search);
    const CriterionValue vg = evaluate_phi(eG, ex.model, xi, dom, opts.search, ex.space);
    std::vector<double> row = {det13(ex.model, xi, ex.theta0),
                               classical_value(CriterionKind::E, ex.model, xi, ex.theta0),
                               ve.value, vg.value};
    for (double c : curvature_cells(ex.model, xi, ex.theta0)) row.push_back(c);
    t.add_row(name, row);
    if (name == "xi_E") {
      run.compare("xi_E.argmin_theta1", ve.argmin.theta[0]);
      run.compare("xi_E.argmin_theta2", ve.argmin.theta[1]);
    }
    run.result().designs.emplace(name, xi);
  }
  return run.finish();
}

ReproduceResult run_ex3(Run& run) {
  const examples::Setup ex = examples::example3();
  const ParameterDomain dom = ex.domain();
  OptimizeOptions opts;
  opts.search = search_with(run.options().seed, 10000);

  // Start from the uniform measure on 0.2, 1 and 23.
  Vector w0 = Vector::Zero(static_cast<Eigen::Index>(ex.space.size()));
  for (double x : {0.2, 1.0, 23.0}) {
    for (std::size_t i = 0; i < ex.space.size(); ++i) {
      if (std::abs(ex.space[i][0] - x) < 1e-9) w0[static_cast<Eigen::Index>(i)] = 1.0 / 3.0;
    }
  }
  OptimizeOptions eopts = opts;
  eopts.w0 = w0;
  const OptimizationReport rep_eE =
      optimize_refined(ex.spec(CriterionKind::eE), ex.model, ex.space, dom, eopts, RefineOptions{});
  run.add_report("xi_eE", rep_eE);
  run.compare_support("xi_eE", rep_eE.design);

  std::vector<CriterionSpec> ec(3), c(3);
  std::vector<ScalarFunctional> g;
  for (int i = 1; i <= 3; ++i) g.push_back(pk1_functional(examples::pk1_functional_name(i)));
  std::vector<DesignMeasure> ec_designs;
  for (int i = 0; i < 3; ++i) {
    ec[i] = ex.spec(CriterionKind::ec);
    ec[i].functional = g[i];
    const OptimizationReport rep =
        optimize(ec[i], ex.model, examples::example3_ec_support(ex, i + 1), dom, opts);
    run.add_report("xi_ec" + std::to_string(i + 1), rep);
    ec_designs.push_back(rep.design);
  }

  Table& t = run.result().table;
  t.columns = {"det13",  "lambda_min", "phi_eE", "phi_c1", "phi_ec1", "phi_c2",
               "phi_ec2", "phi_c3", "phi_ec3", "C_par", "C_int", "C_tot"};
  std::vector<std::pair<std::string, DesignMeasure>> rows = {
      {"xi_D", ex.design("xi_D")}, {"xi_E", ex.design("xi_E")}, {"xi_eE", rep_eE.design}};
  for (int i = 0; i < 3; ++i) {
    const std::string n = std::to_string(i + 1);
    rows.emplace_back("xi_c" + n, ex.design("xi_c" + n));
    rows.emplace_back("xi_ec" + n, ec_designs[static_cast<std::size_t>(i)]);
  }
  const CriterionSpec eE = ex.spec(CriterionKind::eE);
  for (const auto& [name, xi] : rows) {
    std::vector<double> row = {det13(ex.model, xi, ex.theta0),
                               classical_value(CriterionKind::E, ex.model, xi, ex.theta0),
                               evaluate_phi(eE, ex.model, xi, dom, opts.search).value};
    for (int i = 0; i < 3; ++i) {
      row.push_back(classical_value(CriterionKind::c, ex.model, xi, ex.theta0, &g[i]));
      row.push_back(evaluate_phi(ec[i], ex.model, xi, dom, opts.search).value);
    }
    for (double v : curvature_cells(ex.model, xi, ex.theta0)) row.push_back(v);
    t.add_row(name, row);
    run.result().designs.emplace(name, xi);
  }
  return run.finish();
}

ReproduceResult run_ex4(Run& run) {
  const examples::Setup ex = examples::example4();
  const ParameterDomain dom = ex.domain();
  OptimizeOptions opts;
  opts.search = search_with(run.options().seed, 10000);
  OptimizeOptions gopts;
  gopts.search = search_with(run.options().seed, 100000);

  const CriterionSpec eE = ex.spec(CriterionKind::eE);
  const CriterionSpec eG = ex.spec(CriterionKind::eG);
  const OptimizationReport rep_eE = optimize_refined(eE, ex.model, ex.space, dom, opts, RefineOptions{});
  run.add_report("xi_eE", rep_eE);
  run.compare_support("xi_eE", rep_eE.design);
  const OptimizationReport rep_eG = optimize(eG, ex.model, ex.space, dom, gopts);
  run.add_report("xi_eG", rep_eG);
  const DesignMeasure merged = merge_close_points(rep_eG.design, 0.1 + 1e-9);
  run.result().designs.emplace("xi_eG_merged", merged);
  run.compare_support("xi_eG", merged);

  Table& t = run.result().table;
  t.columns = {"det13", "lambda_min", "phi_eE", "phi_eG", "C_par", "C_int", "C_tot"};
  std::vector<std::pair<std::string, DesignMeasure>> rows = ex.designs;
  rows.emplace_back("xi_eE", rep_eE.design);
  rows.emplace_back("xi_eG", rep_eG.design);
  for (const auto& [name, xi] : rows) {
    std::vector<double> row = {det13(ex.model, xi, ex.theta0),
                               classical_value(CriterionKind::E, ex.model, xi, ex.theta0),
                               evaluate_phi(eE, ex.model, xi, dom, opts.search).value,
                               evaluate_phi(eG, ex.model, xi, dom, gopts.search, ex.space).value};
    for (double v : curvature_cells(ex.model, xi, ex.theta0)) row.push_back(v);
    t.add_row(name, row);
    run.result().designs.emplace(name, xi);
  }
  return run.finish();
}

}  // namespace

void Table::add_row(const std::string& name, std::vector<double> row) {
  if (row.size() != columns.size()) throw Error("table row '" + name + "' has the wrong width");
  rows.push_back(name);
  values.push_back(std::move(row));
}

double Table::at(const std::string& row, const std::string& column) const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] != row) continue;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == column) return values[r][c];
    }
  }
  throw Error("no table cell " + row + "/" + column);
}

std::string Table::to_csv() const {
  std::ostringstream os;
  os << "design";
  for (const auto& c : columns) os << "," << c;
  os << "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << rows[r];
    for (double v : values[r]) os << "," << cell(v);
    os << "\n";
  }
  return os.str();
}

bool ReproduceResult::gated_pass() const {
  for (const auto& c : comparisons) {
    if (c.reference.gate && !c.pass) return false;
  }
  return true;
}

const Comparison& ReproduceResult::comparison(const std::string& key) const {
  for (const auto& c : comparisons) {
    if (c.key == key) return c;
  }
  throw Error("no comparison '" + key + "'");
}

double ReproduceResult::value(const std::string& key) const { return comparison(key).computed; }

ReproduceResult reproduce(const std::string& example, const ReproduceOptions& options,
                          const ReferenceValues& refs) {
  Run run(example, options, refs);
  if (example == "ex1") return run_ex1(run);
  if (example == "ex2") return run_ex2(run);
  if (example == "ex3") return run_ex3(run);
  if (example == "ex4") return run_ex4(run);
  throw ConfigError("unknown example '" + example + "' (known: ex1, ex2, ex3, ex4)");
}

void print_comparisons(std::ostream& os, const ReproduceResult& result) {
  const auto flags = os.flags();
  os << std::setprecision(6);
  for (const auto& c : result.comparisons) {
    const char* status = c.pass ? "PASS" : (c.reference.gate ? "FAIL" : "info");
    os << std::left << std::setw(5) << status << std::setw(28) << c.key << " computed "
       << std::setw(13) << cell(c.computed) << " reference " << std::setw(11) << c.reference.value
       << " tol " << c.reference.tolerance_text() << "\n";
  }
  os.flags(flags);
}

int reproduce_exit_code(const ReproduceResult& result) {
  return result.converged && result.gated_pass() ? 0 : 2;
}

}  // namespace extdesign
