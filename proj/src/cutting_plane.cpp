#include "extdesign/cutting_plane.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "search.hpp"

namespace extdesign {

namespace {

Vector start_weights(const OptimizeOptions& options, std::size_t n) {
  const auto ell = static_cast<Eigen::Index>(n);
  if (!options.w0) return Vector::Constant(ell, 1.0 / static_cast<double>(n));
  const Vector& w = *options.w0;
  if (w.size() != ell) throw DesignError("w0 length does not match the design space");
  if ((w.array() < 0.0).any() || !(w.sum() > 0.0)) {
    throw DesignError("w0 must be nonnegative with positive mass");
  }
  return w / w.sum();
}

MaximinSolution run_lp(const Matrix& h, const OptimizeOptions& options) {
  const MaximinSolution sol = solve_maximin(MaximinLP{h, options.extra},
                                            options.extra.empty() ? options.lp_form
                                                                  : LpForm::Primal);
  if (sol.status != LpStatus::Optimal) {
    throw NumericError(std::string("cutting plane: LP ended with status ") +
                       to_string(sol.status));
  }
  if (!sol.w.allFinite()) throw NumericError("cutting plane: LP returned non-finite weights");
  return sol;
}

void check_inputs(const CriterionSpec& spec, const RegressionModel& model,
                  const DesignSpace& space, const ParameterDomain& domain) {
  if (!is_extended(spec.kind)) {
    throw CriterionError(std::string("optimize: ") + to_string(spec.kind) +
                         " is not an extended criterion");
  }
  spec.validate(model.num_params());
  if (space.empty()) throw DesignError("optimize: empty design space");
  for (const auto& x : space) {
    if (x.size() != model.design_dim()) throw DesignError("optimize: design point dimension mismatch");
  }
  if (domain.dim() != model.num_params()) throw CriterionError("optimize: domain dimension mismatch");
}

}  // namespace

struct InnerMinimizer::Impl {
  Impl(const CriterionSpec& s, const RegressionModel& model, const DesignSpace& space,
       const Box& b, double excl, const SearchOptions& o)
      : ev(model, s, space, space),
        box(b),
        exclusion(excl),
        options(o),
        cache(ev, detail::box_probes(s, b, o.grid), excl) {}

  detail::ProbeEvaluator ev;
  Box box;
  double exclusion;
  SearchOptions options;
  detail::GridCache cache;
};

InnerMinimizer::InnerMinimizer(const CriterionSpec& spec, const RegressionModel& model,
                               const DesignSpace& space, const ParameterDomain& domain,
                               const SearchOptions& options) {
  if (!domain.is_box()) throw CriterionError("inner minimization needs a box domain");
  spec.validate(model.num_params());
  impl_ = std::make_unique<Impl>(spec, model, space, domain.box(),
                                 exclusion_radius(spec, domain), options);
}

InnerMinimizer::~InnerMinimizer() = default;

InnerResult InnerMinimizer::operator()(const Vector& w) {
  if (w.size() != static_cast<Eigen::Index>(impl_->ev.size())) {
    throw DesignError("inner minimization: weight vector does not match the design space");
  }
  const auto hits = detail::search_box(impl_->ev, w, impl_->cache, impl_->box, impl_->exclusion,
                                       impl_->options.polish_starts, impl_->options.polish);
  InnerResult out{hits.front().probe, hits.front().value, std::nullopt};
  if (impl_->ev.spec().kind == CriterionKind::eG) out.x = impl_->ev.argmax_x(out.probe);
  impl_->cache.append(out.probe);
  return out;
}

void InnerMinimizer::add(const Probe& probe) { impl_->cache.append(probe); }

std::optional<Vector> InnerMinimizer::column(const Probe& probe) const {
  return impl_->ev.column(probe);
}

InnerResult inner_argmin(const CriterionSpec& spec, const RegressionModel& model,
                         const DesignSpace& space, const Vector& w, const ParameterDomain& domain,
                         const SearchOptions& options) {
  InnerMinimizer inner(spec, model, space, domain, options);
  return inner(w);
}

OptimizationReport optimize(const CriterionSpec& spec, const RegressionModel& model,
                            const DesignSpace& space, const ParameterDomain& domain,
                            const OptimizeOptions& options) {
  const auto t_start = std::chrono::steady_clock::now();
  check_inputs(spec, model, space, domain);
  detail::ProbeEvaluator ev(model, spec, space, space);
  const auto ell = static_cast<Eigen::Index>(space.size());

  OptimizationReport rep;
  rep.space = space;
  rep.seed = options.search.grid.seed;
  Vector w = start_weights(options, space.size());

  if (!domain.is_box()) {
    std::vector<Probe> probes;
    std::vector<Vector> cols;
    for (const auto& probe : detail::finite_probes(spec, domain.finite_set())) {
      auto col = ev.column(probe);
      if (!col) continue;
      probes.push_back(probe);
      cols.push_back(*col);
    }
    if (cols.empty()) throw CriterionError("no admissible parameter: every constraint is vacuous");
    Matrix h(ell, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) h.col(static_cast<Eigen::Index>(j)) = cols[j];
    const MaximinSolution sol = run_lp(h, options);
    w = sol.w;
    const double phi = (h.transpose() * w).minCoeff();
    rep.gap_history.push_back(GapRecord{1, phi, phi, 0.0});
    rep.cuts = probes;
    rep.value = phi;
    rep.upper_bound = phi;
    rep.converged = true;
    rep.iterations = 1;
  } else {
    InnerMinimizer inner(spec, model, space, domain, options.search);
    std::vector<Vector> cols;
    auto add_cut = [&](const Probe& probe) {
      auto col = inner.column(probe);
      if (!col) return false;
      rep.cuts.push_back(probe);
      cols.push_back(*col);
      return true;
    };
    for (const auto& probe : options.initial_cuts) {
      if (add_cut(probe)) inner.add(probe);
    }
    add_cut(inner(w).probe);
    if (cols.empty()) throw CriterionError("cutting plane: no usable initial cut");

    for (int k = 1; k <= options.max_iter; ++k) {
      Matrix h(ell, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j) h.col(static_cast<Eigen::Index>(j)) = cols[j];
      w = run_lp(h, options).w;
      const double t = (h.transpose() * w).minCoeff();
      const InnerResult best = inner(w);
      const double phi = std::min(best.value, t);
      const double delta = t - phi;
      rep.gap_history.push_back(GapRecord{k, t, phi, delta});
      rep.iterations = k;
      rep.value = phi;
      rep.upper_bound = t;
      if (delta < options.eps) {
        rep.converged = true;
        break;
      }
      if (!add_cut(best.probe)) break;
    }
  }

  rep.weights = w;
  rep.design = design_from_weights(space, w);
  if (options.certificate) {
    rep.active = active_set(spec, model, rep.design, domain, options.search, space, rep.cuts);
    rep.certificate = optimality_certificate(spec, model, rep.design, space, *rep.active);
  }
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

OptimizationReport optimize_refined(const CriterionSpec& spec, const RegressionModel& model,
                                    const DesignSpace& space, const ParameterDomain& domain,
                                    const OptimizeOptions& options, const RefineOptions& refine) {
  if (model.design_dim() != 1) throw DesignError("refinement needs one-dimensional designs");
  if (refine.points < 2 || refine.rounds < 0 || !(refine.span > 0.0) || refine.merge < 0.0) {
    throw DesignError("invalid refinement options");
  }
  const auto t_start = std::chrono::steady_clock::now();
  OptimizeOptions opts = options;
  opts.certificate = false;
  std::vector<GapRecord> history;
  OptimizationReport rep;

  // Re-solves on a new space, warm-started from the current design and cuts.
  auto solve_on = [&](const DesignSpace& pts, const std::vector<double>& w_init) {
    if (!w_init.empty()) {
      opts.w0 = Eigen::Map<const Vector>(w_init.data(), static_cast<Eigen::Index>(w_init.size()));
      opts.initial_cuts.clear();
      for (const auto& c : rep.cuts) {
        if (!c.is_limit()) opts.initial_cuts.push_back(c);
      }
    }
    rep = optimize(spec, model, pts, domain, opts);
    const int offset = history.empty() ? 0 : history.back().k;
    for (auto g : rep.gap_history) {
      g.k += offset;
      history.push_back(g);
    }
  };
  solve_on(space, {});

  double span = refine.span;
  for (int r = 0; r < refine.rounds; ++r, span *= refine.shrink) {
    std::vector<double> grid;
    for (std::size_t i = 0; i < rep.design.size(); ++i) {
      const double s = rep.design.point(i)[0];
      for (int j = 0; j < refine.points; ++j) {
        const double rel = span * (2.0 * j / (refine.points - 1) - 1.0);
        grid.push_back(s * (1.0 + rel));
      }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
               grid.end());
    DesignSpace refined;
    std::vector<double> w0(grid.size(), 0.0);
    for (double v : grid) refined.push_back(DesignPoint::Constant(1, v));
    for (std::size_t i = 0; i < rep.design.size(); ++i) {
      for (std::size_t k = 0; k < refined.size(); ++k) {
        if (same_point(refined[k], rep.design.point(i), 1e-12)) {
          w0[k] += rep.design.weight(i);
          break;
        }
      }
    }
    solve_on(refined, w0);
  }

  // Neighbouring support points left by the last grid are merged, and the
  // weights re-optimized on the merged support.
  std::vector<double> pts, wts;
  for (std::size_t i = 0; i < rep.design.size(); ++i) {
    const double x = rep.design.point(i)[0];
    const double w = rep.design.weight(i);
    if (!pts.empty() && std::abs(x - pts.back()) <= refine.merge * std::max(std::abs(x), std::abs(pts.back()))) {
      pts.back() = (pts.back() * wts.back() + x * w) / (wts.back() + w);
      wts.back() += w;
    } else {
      pts.push_back(x);
      wts.push_back(w);
    }
  }
  if (pts.size() < rep.design.size()) {
    DesignSpace merged;
    for (double v : pts) merged.push_back(DesignPoint::Constant(1, v));
    solve_on(merged, wts);
  }

  if (options.certificate) {
    rep.active = active_set(spec, model, rep.design, domain, options.search, rep.space, rep.cuts);
    rep.certificate = optimality_certificate(spec, model, rep.design, rep.space, *rep.active);
  }
  rep.gap_history = history;
  rep.iterations = history.empty() ? 0 : history.back().k;
  rep.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

}  // namespace extdesign
