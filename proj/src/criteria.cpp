#include "extdesign/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "extdesign/lp.hpp"
#include "search.hpp"

namespace extdesign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const ParameterVector& anchor(const CriterionSpec& spec,
                              const std::optional<ParameterVector>& override_theta0) {
  if (override_theta0) return *override_theta0;
  if (!spec.theta0) throw CriterionError("criterion needs theta0");
  return *spec.theta0;
}

CriterionSpec with_anchor(const CriterionSpec& spec, const ParameterVector& theta0) {
  CriterionSpec out = spec;
  out.theta0 = theta0;
  out.worst_case = false;
  return out;
}

// Distance used to merge nearby active points: unit-cube coordinates of the box.
double probe_distance(const Probe& a, const Probe& b, const Box& box) {
  if (a.is_limit() != b.is_limit()) return kInf;
  if (a.is_limit()) return (a.theta0 - b.theta0).norm();
  return (box.to_unit(a.theta) - box.to_unit(b.theta)).norm() +
         (box.to_unit(a.theta0) - box.to_unit(b.theta0)).norm();
}

}  // namespace

const char* to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::eE: return "eE";
    case CriterionKind::ec: return "ec";
    case CriterionKind::eG: return "eG";
    case CriterionKind::E: return "E";
    case CriterionKind::c: return "c";
    case CriterionKind::G: return "G";
    case CriterionKind::D: return "D";
  }
  return "?";
}

CriterionKind parse_criterion_kind(const std::string& name) {
  for (auto k : {CriterionKind::eE, CriterionKind::ec, CriterionKind::eG, CriterionKind::E,
                 CriterionKind::c, CriterionKind::G, CriterionKind::D}) {
    if (name == to_string(k)) return k;
  }
  throw CriterionError("unknown criterion '" + name + "' (known: eE, ec, eG, E, c, G, D)");
}

bool is_extended(CriterionKind kind) {
  return kind == CriterionKind::eE || kind == CriterionKind::ec || kind == CriterionKind::eG;
}

void CriterionSpec::validate(int num_params) const {
  if (!std::isfinite(K) || K < 0.0) throw CriterionError("K must be finite and nonnegative");
  if ((kind == CriterionKind::ec || kind == CriterionKind::c) && !functional) {
    throw CriterionError(std::string(to_string(kind)) + " needs a functional g");
  }
  if (worst_case) {
    if (!is_extended(kind)) throw CriterionError("worst-case form exists for eE, ec, eG only");
    if (theta0) throw CriterionError("worst-case criteria take no theta0");
  } else {
    if (!theta0) throw CriterionError(std::string(to_string(kind)) + " needs theta0");
    if (theta0->size() != num_params) {
      throw CriterionError("theta0 has dimension " + std::to_string(theta0->size()) +
                           ", expected " + std::to_string(num_params));
    }
  }
  if (exclusion_radius && !(*exclusion_radius > 0.0)) {
    throw CriterionError("exclusion radius must be positive");
  }
}

double default_exclusion_radius(const ParameterDomain& domain) {
  return 1e-4 * domain.diameter();
}

double exclusion_radius(const CriterionSpec& spec, const ParameterDomain& domain) {
  return spec.exclusion_radius ? *spec.exclusion_radius : default_exclusion_radius(domain);
}

double active_tolerance(double phi) { return std::max(1e-8, 1e-6 * std::abs(phi)); }

std::optional<double> h_ratio(const CriterionSpec& spec, const RegressionModel& model,
                              const DesignPoint& x, const ParameterVector& theta,
                              const DesignSpace& design_space,
                              const std::optional<ParameterVector>& theta0_override) {
  const ParameterVector& t0 = anchor(spec, theta0_override);
  detail::ProbeEvaluator ev(model, with_anchor(spec, t0), {x}, design_space);
  auto col = ev.column(Probe{theta, t0, std::nullopt});
  if (!col) return std::nullopt;
  return (*col)[0];
}

std::optional<double> H_value(const CriterionSpec& spec, const RegressionModel& model,
                              const DesignMeasure& xi, const ParameterVector& theta,
                              const DesignSpace& design_space,
                              const std::optional<ParameterVector>& theta0_override) {
  const ParameterVector& t0 = anchor(spec, theta0_override);
  detail::ProbeEvaluator ev(model, with_anchor(spec, t0), xi.support(), design_space);
  return ev.H(xi.weights(), Probe{theta, t0, std::nullopt});
}

std::optional<double> H_value(const CriterionSpec& spec, const RegressionModel& model,
                              const DesignMeasure& xi, const Probe& probe,
                              const DesignSpace& design_space) {
  detail::ProbeEvaluator ev(model, with_anchor(spec, probe.theta0), xi.support(), design_space);
  return ev.H(xi.weights(), probe);
}

LimitValue limit_value(const CriterionSpec& spec, const RegressionModel& model,
                       const DesignMeasure& xi, const ParameterVector& theta0) {
  detail::ProbeEvaluator ev(model, with_anchor(spec, theta0), xi.support());
  return ev.limit(xi.weights(), theta0);
}

CriterionValue evaluate_phi(const CriterionSpec& spec, const RegressionModel& model,
                            const DesignMeasure& xi, const ParameterDomain& domain,
                            const SearchOptions& options, const DesignSpace& design_space) {
  if (!is_extended(spec.kind)) {
    throw CriterionError(std::string("evaluate_phi: ") + to_string(spec.kind) +
                         " is a classical criterion, use classical_value");
  }
  spec.validate(model.num_params());
  if (domain.dim() != model.num_params()) throw CriterionError("domain dimension mismatch");
  detail::ProbeEvaluator ev(model, spec, xi.support(), design_space);
  const Vector& w = xi.weights();
  CriterionValue out;
  if (!domain.is_box()) {
    bool found = false;
    for (const auto& probe : detail::finite_probes(spec, domain.finite_set())) {
      auto h = ev.H(w, probe);
      if (!h) continue;
      if (!found || *h < out.value) {
        out.value = *h;
        out.argmin = probe;
        found = true;
      }
    }
    if (!found) throw CriterionError("no admissible parameter: every constraint is vacuous");
  } else {
    const Box& box = domain.box();
    const double excl = exclusion_radius(spec, domain);
    detail::GridCache cache(ev, detail::box_probes(spec, box, options.grid), excl);
    const auto hits = detail::search_box(ev, w, cache, box, excl, options.polish_starts,
                                         options.polish);
    out.value = hits.front().value;
    out.argmin = hits.front().probe;
    out.near_boundary = out.argmin.is_limit() ||
                        (out.argmin.theta - out.argmin.theta0).norm() < 2.0 * excl;
  }
  if (spec.kind == CriterionKind::eG) out.argmin_x = ev.argmax_x(out.argmin);
  return out;
}

Matrix generalized_inverse(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  const Vector& lam = es.eigenvalues();
  const double cutoff = 1e-10 * std::max(1.0, lam.maxCoeff());
  Vector inv = Vector::Zero(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] > cutoff) inv[i] = 1.0 / lam[i];
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double c_value(const Matrix& m, const Vector& c) {
  const Matrix g = generalized_inverse(m);
  const Vector resid = c - m * (g * c);
  if (resid.norm() > 1e-8 * std::max(1.0, c.norm())) return 0.0;
  const double q = c.dot(g * c);
  return q > 0.0 ? 1.0 / q : 0.0;
}

double classical_value(CriterionKind kind, const RegressionModel& model, const DesignMeasure& xi,
                       const ParameterVector& theta0, const ScalarFunctional* functional,
                       const DesignSpace& design_space) {
  const Matrix m = info_matrix(model, xi, theta0);
  const int p = model.num_params();
  switch (kind) {
    case CriterionKind::E:
      return min_eigenvalue(m);
    case CriterionKind::D: {
      const Vector lam = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
      if (lam[0] <= 1e-10 * std::max(1.0, lam[lam.size() - 1])) return 0.0;
      return std::exp(lam.array().log().sum() / p);
    }
    case CriterionKind::c:
      if (!functional) throw CriterionError("c-optimality needs a functional g");
      return c_value(m, functional->gradient(theta0));
    case CriterionKind::G: {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m);
      const Vector& lam = es.eigenvalues();
      if (lam[0] <= 1e-10 * std::max(1.0, lam[lam.size() - 1])) return 0.0;
      const Matrix inv = es.eigenvectors() * lam.cwiseInverse().asDiagonal() *
                         es.eigenvectors().transpose();
      const DesignSpace& pts = design_space.empty() ? xi.support() : design_space;
      double worst = 0.0;
      for (const auto& x : pts) {
        const Vector j = model.jacobian(x, theta0);
        worst = std::max(worst, j.dot(inv * j));
      }
      return worst > 0.0 ? 1.0 / worst : 0.0;
    }
    default:
      throw CriterionError(std::string(to_string(kind)) + " is an extended criterion");
  }
}

ActiveSet active_set(const CriterionSpec& spec, const RegressionModel& model,
                     const DesignMeasure& xi, const ParameterDomain& domain,
                     const SearchOptions& options, const DesignSpace& design_space,
                     const std::vector<Probe>& seeds) {
  spec.validate(model.num_params());
  detail::ProbeEvaluator ev(model, spec, xi.support(), design_space);
  const Vector& w = xi.weights();
  std::vector<detail::SearchHit> hits;
  if (!domain.is_box()) {
    for (const auto& probe : detail::finite_probes(spec, domain.finite_set())) {
      auto h = ev.H(w, probe);
      if (h) hits.push_back({probe, *h});
    }
    if (hits.empty()) throw CriterionError("no admissible parameter: every constraint is vacuous");
    std::stable_sort(hits.begin(), hits.end(),
                     [](const auto& a, const auto& b) { return a.value < b.value; });
  } else {
    const Box& box = domain.box();
    const double excl = exclusion_radius(spec, domain);
    detail::GridCache cache(ev, detail::box_probes(spec, box, options.grid), excl);
    hits = detail::search_box(ev, w, cache, box, excl, options.active_starts, options.polish,
                              seeds);
  }
  ActiveSet out;
  out.phi = hits.front().value;
  out.tolerance = active_tolerance(out.phi);
  for (const auto& h : hits) {
    if (h.value > out.phi + out.tolerance) break;
    bool duplicate = false;
    for (const auto& kept : out.points) {
      const double d = domain.is_box() ? probe_distance(h.probe, kept, domain.box())
                                       : (h.probe.theta - kept.theta).norm() +
                                             (h.probe.theta0 - kept.theta0).norm();
      if (d <= 1e-4) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.points.push_back(h.probe);
  }
  return out;
}

double directional_derivative(const CriterionSpec& spec, const RegressionModel& model,
                              const DesignMeasure& xi, const DesignMeasure& nu,
                              const ActiveSet& active, const DesignSpace& design_space) {
  (void)xi;
  if (active.points.empty()) throw CriterionError("empty active set");
  double best = kInf;
  for (const auto& probe : active.points) {
    detail::ProbeEvaluator ev(model, with_anchor(spec, probe.theta0), nu.support(), design_space);
    auto h = ev.H(nu.weights(), probe);
    if (h) best = std::min(best, *h);
  }
  if (!std::isfinite(best)) throw CriterionError("every active constraint is vacuous");
  return best - active.phi;
}

Certificate optimality_certificate(const CriterionSpec& spec, const RegressionModel& model,
                                   const DesignMeasure& xi, const DesignSpace& space,
                                   const ActiveSet& active) {
  if (active.points.empty()) throw CriterionError("empty active set");
  const auto n = static_cast<Eigen::Index>(space.size());
  std::vector<Vector> cols;
  for (const auto& probe : active.points) {
    const CriterionSpec s = with_anchor(spec, probe.theta0);
    detail::ProbeEvaluator on_space(model, s, space, space);
    detail::ProbeEvaluator on_xi(model, s, xi.support(), space);
    auto col = on_space.column(probe);
    auto h = on_xi.H(xi.weights(), probe);
    if (!col || !h) continue;
    cols.push_back(col->array() - *h);
  }
  if (cols.empty()) throw CriterionError("every active constraint is vacuous");
  Certificate cert;
  cert.psi.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) cert.psi.col(static_cast<Eigen::Index>(j)) = cols[j];
  if (cols.size() == 1) {
    cert.mu = Vector::Ones(1);
    cert.value = cert.psi.col(0).maxCoeff();
  } else {
    const auto sol = solve_minmax_measure(cert.psi);
    cert.mu = sol.mu;
    cert.value = sol.value;
  }
  return cert;
}

}  // namespace extdesign
