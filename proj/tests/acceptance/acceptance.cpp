// Acceptance report: one PASS/FAIL line per criterion.
//
//   acceptance [--only N]... [--out DIR]

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "examples.hpp"
#include "extdesign/cutting_plane.hpp"
#include "extdesign/estimation.hpp"
#include "reference_values.hpp"
#include "reproduce.hpp"
#include "../unit/oracles.hpp"

using namespace extdesign;

namespace {

struct Outcome {
  bool pass = true;
  int checks = 0;
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

class Examples {
 public:
  Examples(const ReferenceValues& refs, std::string out_dir) : refs_(refs), out_dir_(std::move(out_dir)) {}

  const ReproduceResult& get(const std::string& id) {
    auto it = cache_.find(id);
    if (it == cache_.end()) {
      ReproduceOptions o;
      if (!out_dir_.empty()) o.out_dir = out_dir_;
      it = cache_.emplace(id, reproduce(id, o, refs_)).first;
    }
    return it->second;
  }

 private:
  const ReferenceValues& refs_;
  std::string out_dir_;
  std::map<std::string, ReproduceResult> cache_;
};

void check_keys(Outcome& o, const ReproduceResult& r, const std::function<bool(const std::string&)>& select) {
  for (const auto& c : r.comparisons) {
    if (!select(c.key) || !c.reference.gate) continue;
    o.check(c.pass, c.key + " = " + fmt(c.computed) + " vs " + fmt(c.reference.value) + " " +
                        c.reference.tolerance_text());
  }
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }
bool contains(const std::string& s, const std::string& p) { return s.find(p) != std::string::npos; }

void check_time(Outcome& o, double seconds, double limit) {
  o.check(seconds < limit, "runtime " + fmt(seconds) + " s over " + fmt(limit) + " s");
}

Outcome criterion1(Examples& ex) {
  Outcome o;
  const auto& r = ex.get("ex1");
  check_keys(o, r, [](const std::string&) { return true; });
  check_time(o, r.wall_time, 5.0);
  return o;
}

Outcome criterion2(Examples& ex) {
  Outcome o;
  const auto& r = ex.get("ex2");
  check_keys(o, r, [](const std::string& k) {
    return k == "ex2.xi_eE.phi_eE" || k == "ex2.xi_eG.phi_eG" || contains(k, ".w");
  });
  o.check(r.reports.at("xi_eE").design.size() == 3, "eE support size " +
                                                       std::to_string(r.reports.at("xi_eE").design.size()));
  o.check(r.reports.at("xi_eG").design.size() == 4, "eG support size " +
                                                       std::to_string(r.reports.at("xi_eG").design.size()));
  check_time(o, r.wall_time, 60.0);
  return o;
}

Outcome criterion3(Examples& ex) {
  Outcome o;
  const auto& r = ex.get("ex2");
  check_keys(o, r, [](const std::string& k) {
    return k == "ex2.xi_E.phi_eE" || k == "ex2.xi_E.phi_eG" || contains(k, "argmin");
  });
  return o;
}

Outcome criterion4(Examples& ex) {
  Outcome o;
  const auto& r = ex.get("ex3");
  check_keys(o, r, [](const std::string& k) {
    return starts_with(k, "ex3.xi_eE.") || k == "ex3.xi_D.phi_eE" || k == "ex3.xi_E.lambda_min";
  });
  check_time(o, r.wall_time, 300.0);
  return o;
}

Outcome criterion5(Examples& ex) {
  Outcome o;
  const auto& r = ex.get("ex3");
  check_keys(o, r, [](const std::string& k) {
    return starts_with(k, "ex3.xi_ec") || (starts_with(k, "ex3.xi_c") && !contains(k, ".C_"));
  });
  return o;
}

Outcome criterion6(Examples& ex) {
  Outcome o;
  const auto& r = ex.get("ex4");
  check_keys(o, r, [](const std::string& k) { return !contains(k, ".C_"); });
  check_time(o, r.wall_time, 300.0);
  return o;
}

Outcome criterion7(Examples& ex) {
  Outcome o;
  check_keys(o, ex.get("ex2"), [](const std::string& k) { return contains(k, ".C_"); });
  check_keys(o, ex.get("ex4"), [](const std::string& k) { return k == "ex4.xi_0.C_tot"; });
  return o;
}

// ---------------------------------------------------------------------------
// Property suite.

std::vector<ParameterVector> random_points(const Box& box, int n, Rng& rng) {
  std::vector<ParameterVector> out;
  for (int i = 0; i < n; ++i) {
    Vector u(box.dim());
    for (int j = 0; j < box.dim(); ++j) u[j] = rng.uniform();
    out.push_back(box.from_unit(u));
  }
  return out;
}

DesignMeasure random_measure(const DesignSpace& space, Rng& rng) {
  Vector w(static_cast<Eigen::Index>(space.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = 0.02 + rng.uniform();
  return design_from_weights(space, w / w.sum());
}

RegressionModel quadratic() {
  return linear_model("quadratic", 3, 1, [](const DesignPoint& x) {
    return (Vector(3) << 1.0, x[0], x[0] * x[0]).finished();
  });
}

void concavity_homogeneity(Outcome& o) {
  const auto ex = examples::example2();
  Rng rng(101);
  int bad_concave = 0, bad_homog = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const ParameterDomain dom(FiniteSet{random_points(ex.box, 15, rng)});
    const CriterionSpec spec = ex.spec(inst % 2 == 0 ? CriterionKind::eE : CriterionKind::eG);
    const DesignMeasure a = random_measure(ex.space, rng);
    const DesignMeasure b = random_measure(ex.space, rng);
    const double alpha = rng.uniform();
    const double pa = evaluate_phi(spec, ex.model, a, dom, {}, ex.space).value;
    const double pb = evaluate_phi(spec, ex.model, b, dom, {}, ex.space).value;
    const double pm = evaluate_phi(spec, ex.model, a.mix(b, alpha), dom, {}, ex.space).value;
    if (pm < (1 - alpha) * pa + alpha * pb - 1e-12) ++bad_concave;
    const double s = 0.1 + 3.0 * rng.uniform();
    const double ps = evaluate_phi(spec, ex.model, a.scaled(s), dom, {}, ex.space).value;
    if (std::abs(ps - s * pa) > 1e-12 * std::max(1.0, s * pa)) ++bad_homog;
  }
  o.check(bad_concave == 0, "concavity violated on " + std::to_string(bad_concave) + " of 100 instances");
  o.check(bad_homog == 0, "homogeneity violated on " + std::to_string(bad_homog) + " of 100 instances");
}

void sandwich(Outcome& o) {
  const auto ex = examples::example2();
  for (CriterionKind kind : {CriterionKind::eE, CriterionKind::eG}) {
    const auto rep = optimize(ex.spec(kind), ex.model, ex.space, ex.domain());
    bool ok = rep.converged;
    for (const auto& g : rep.gap_history) {
      ok = ok && g.phi <= rep.value + 1e-9 && rep.value <= g.t + 1e-9;
    }
    o.check(ok, std::string("LP sandwich broken for ") + to_string(kind));
  }
}

void lp_vs_grid(Outcome& o) {
  Rng rng(202);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    Matrix h(3, 5);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = rng.uniform();
    const auto s = solve_maximin({h, {}});
    worst = std::max(worst, std::abs(s.t - oracle::maximin_grid(h, 0.01)));
  }
  o.check(worst <= 0.02, "LP vs simplex grid differs by " + fmt(worst));
}

double certificate_of(const CriterionSpec& spec, const RegressionModel& model, const DesignMeasure& xi,
                      const ParameterDomain& dom, const DesignSpace& space) {
  const ActiveSet act = active_set(spec, model, xi, dom, {}, space);
  return optimality_certificate(spec, model, xi, space, act).value;
}

void certificates(Outcome& o) {
  const auto ex = examples::example2();
  const auto rep = optimize(ex.spec(CriterionKind::eE), ex.model, ex.space, ex.domain());
  o.check(rep.certificate && rep.certificate->value <= 1e-3,
          "certificate at the eE optimum " + fmt(rep.certificate ? rep.certificate->value : NAN));
  const DesignMeasure off = rep.design.mix(uniform_design({ex.space[2]}), 0.3);
  const double c_off = certificate_of(ex.spec(CriterionKind::eE), ex.model, off, ex.domain(), ex.space);
  o.check(c_off > 1e-3, "certificate at a perturbed eE design " + fmt(c_off));

  const RegressionModel q = quadratic();
  const DesignSpace space = examples::range_1d(-1.0, 0.1, 1.0);
  CriterionSpec eG;
  eG.kind = CriterionKind::eG;
  eG.theta0 = Vector::Zero(3);
  const ParameterDomain dom(Box(-Vector::Ones(3), Vector::Ones(3)));
  const auto g = optimize(eG, q, space, dom);
  o.check(g.certificate && g.certificate->value <= 1e-3,
          "certificate at the linear eG optimum " + fmt(g.certificate ? g.certificate->value : NAN));
  const DesignMeasure g_off = g.design.mix(uniform_design({space[10]}), 0.3);
  const double cg = certificate_of(eG, q, g_off, dom, space);
  o.check(cg > 1e-3, "certificate at a perturbed linear eG design " + fmt(cg));
  // G-optimal value of a linear model is 1/p.
  o.check(std::abs(g.value - 1.0 / 3.0) <= 1e-3, "linear eG optimum " + fmt(g.value) + " vs 1/3");
}

void linear_identities(Outcome& o) {
  const RegressionModel q = quadratic();
  Rng rng(303);
  const ParameterDomain dom(Box(-Vector::Ones(3), Vector::Ones(3)));
  SearchOptions search;
  search.grid.n_points = 3000;
  double worst_e = 0.0, worst_c = 0.0;
  for (int inst = 0; inst < 5; ++inst) {
    const DesignMeasure xi = random_measure(examples::range_1d(-1.0, 0.5, 1.0), rng);
    Matrix m = Matrix::Zero(3, 3);
    for (std::size_t i = 0; i < xi.size(); ++i) {
      const double x = xi.point(i)[0];
      const Vector f = (Vector(3) << 1.0, x, x * x).finished();
      m += xi.weight(i) * f * f.transpose();
    }
    CriterionSpec eE;
    eE.theta0 = random_points(dom.box(), 1, rng)[0] * 0.5;
    const double lam = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues()[0];
    worst_e = std::max(worst_e, std::abs(evaluate_phi(eE, q, xi, dom, search).value - lam) / lam);
    CriterionSpec ec = eE;
    ec.kind = CriterionKind::ec;
    const Vector c = (Vector(3) << rng.normal(), rng.normal(), rng.normal()).finished();
    ec.functional = linear_functional(c);
    const double cv = 1.0 / c.dot(m.inverse() * c);
    worst_c = std::max(worst_c, std::abs(evaluate_phi(ec, q, xi, dom, search).value - cv) / cv);
  }
  o.check(worst_e <= 1e-8, "phi_eE vs lambda_min relative error " + fmt(worst_e));
  o.check(worst_c <= 1e-8, "phi_ec vs [c^T M^-1 c]^-1 relative error " + fmt(worst_c));
}

void shrinking_box(Outcome& o) {
  const auto ex = examples::example2();
  const CriterionSpec spec = ex.spec(CriterionKind::eE);
  bool ok = true;
  for (const auto& name : {"xi_D", "xi_E"}) {
    double prev = -1.0;
    for (double s : {1.0, 0.3, 0.1, 0.01, 0.001}) {
      const Box b(ex.theta0 + s * (ex.box.lower - ex.theta0), ex.theta0 + s * (ex.box.upper - ex.theta0));
      const double v = evaluate_phi(spec, ex.model, ex.design(name), ParameterDomain(b)).value;
      ok = ok && v >= prev - 1e-9 * std::max(1.0, prev);
      prev = v;
    }
    const double lam = min_eigenvalue(info_matrix(ex.model, ex.design(name), ex.theta0));
    ok = ok && prev <= lam + 1e-12 && prev >= lam * (1 - 1e-2);
  }
  o.check(ok, "phi not monotone in the box size or not tending to lambda_min");
}

void localization(Outcome& o) {
  const auto ex = examples::example2();
  const DesignMeasure xi = validate_design(ex.space, (Vector(4) << 0.32, 0.197, 0.0, 0.483).finished());
  const auto x = replicate_design(xi, 40);
  Vector w = Vector::Zero(static_cast<Eigen::Index>(xi.size()));
  for (const auto& p : x) {
    for (std::size_t i = 0; i < xi.size(); ++i) {
      if (same_point(p, xi.point(i))) w[static_cast<Eigen::Index>(i)] += 1.0 / static_cast<double>(x.size());
    }
  }
  SearchOptions search;
  search.grid.n_points = 50000;
  const double phi = evaluate_phi(ex.spec(CriterionKind::eE), ex.model,
                                  DesignMeasure::unchecked(xi.support(), w), ex.domain(), search).value;
  FitOptions fo;
  fo.starts = 20;
  int outside = 0, not_global = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto obs = simulate_observations(ex.model, x, ex.theta0, 0.5, stream_seed(1000, static_cast<std::uint64_t>(rep)));
    const FitResult fit = ls_fit_multistart(ex.model, obs, ex.box, fo);
    const double r0 = std::sqrt(residual_ss(ex.model, obs, ex.theta0));
    if (fit.residual > r0) {
      ++not_global;
      continue;
    }
    const double lhs = (fit.theta - ex.theta0).norm() * std::sqrt(static_cast<double>(obs.size())) * std::sqrt(phi);
    if (lhs > 2.0 * r0 + 1e-8) ++outside;
  }
  o.check(outside == 0, std::to_string(outside) + " of 1000 estimates outside the localization ball");
  o.check(not_global == 0, std::to_string(not_global) + " fits worse than the true parameter");
}

void k_identity_and_worst_case(Outcome& o) {
  const auto ex = examples::example2();
  Rng rng(404);
  double worst = 0.0;
  for (const auto& th : random_points(ex.box, 200, rng)) {
    const double K = 5.0 * rng.uniform();
    CriterionSpec s0 = ex.spec(CriterionKind::eE);
    CriterionSpec sk = s0;
    sk.K = K;
    const double h0 = *H_value(s0, ex.model, ex.design("xi_D"), th);
    const double hk = *H_value(sk, ex.model, ex.design("xi_D"), th);
    const double expect = h0 * (1.0 + K * (th - ex.theta0).squaredNorm());
    worst = std::max(worst, std::abs(hk - expect) / std::max(1e-300, std::abs(expect)));
  }
  o.check(worst <= 1e-12, "K identity relative error " + fmt(worst));

  const auto thetas = random_points(ex.box, 15, rng);
  const ParameterDomain dom(FiniteSet{thetas});
  CriterionSpec wc;
  wc.worst_case = true;
  bool ok = true;
  for (const auto& name : {"xi_D", "xi_E"}) {
    const double worst_phi = evaluate_phi(wc, ex.model, ex.design(name), dom).value;
    for (const auto& t0 : thetas) {
      CriterionSpec s;
      s.theta0 = t0;
      ok = ok && worst_phi <= evaluate_phi(s, ex.model, ex.design(name), dom).value + 1e-15;
    }
  }
  o.check(ok, "worst-case criterion exceeds an anchored one");
}

Outcome criterion8(Examples&) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  concavity_homogeneity(o);
  sandwich(o);
  lp_vs_grid(o);
  certificates(o);
  linear_identities(o);
  shrinking_box(o);
  localization(o);
  k_identity_and_worst_case(o);
  check_time(o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 600.0);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)(Examples&);
};

const Criterion kCriteria[] = {
    {1, "circle model sweep", criterion1},
    {2, "bilinear model eE and eG optima", criterion2},
    {3, "bilinear model identifiability zeros", criterion3},
    {4, "one-compartment eE optimum and cross evaluations", criterion4},
    {5, "one-compartment extended c-optima", criterion5},
    {6, "one-compartment wide box", criterion6},
    {7, "curvature measures", criterion7},
    {8, "property suite", criterion8},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  std::string out_dir;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only.insert(std::stoi(argv[++i]));
    } else if (a == "--out" && i + 1 < argc) {
      out_dir = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only N]... [--out DIR]\n";
      return 2;
    }
  }

  const ReferenceValues refs = ReferenceValues::load_default();
  Examples ex(refs, out_dir);
  bool all = true;
  for (const auto& c : kCriteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ex);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.pass;
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.title << " ("
              << o.checks - static_cast<int>(o.failures.size()) << "/" << o.checks << " checks, "
              << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat << "\n";
    for (const auto& f : o.failures) std::cout << "    " << f << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
