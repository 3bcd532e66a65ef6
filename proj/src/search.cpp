#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "extdesign/parallel.hpp"

namespace extdesign::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector responses(const RegressionModel& model, const std::vector<DesignPoint>& pts,
                 const ParameterVector& theta) {
  Vector eta(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    eta[static_cast<Eigen::Index>(i)] = model.response(pts[i], theta);
  }
  return eta;
}

}  // namespace

ProbeEvaluator::ProbeEvaluator(const RegressionModel& model, const CriterionSpec& spec,
                               std::vector<DesignPoint> points, const DesignSpace& den_space)
    : model_(model), spec_(spec), points_(std::move(points)) {
  all_ = points_;
  num_idx_.resize(points_.size());
  std::iota(num_idx_.begin(), num_idx_.end(), std::size_t{0});
  if (spec_.kind == CriterionKind::eG) {
    if (den_space.empty()) {
      den_idx_ = num_idx_;
    } else {
      for (const auto& x : den_space) {
        std::size_t k = 0;
        while (k < all_.size() && !same_point(all_[k], x)) ++k;
        if (k == all_.size()) all_.push_back(x);
        den_idx_.push_back(k);
      }
    }
  }
  if (spec_.theta0 && !spec_.worst_case) {
    anchor_ = *spec_.theta0;
    anchor_eta_ = responses(model_, all_, *anchor_);
    anchor_jac_.resize(model_.num_params(), static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      anchor_jac_.col(static_cast<Eigen::Index>(i)) = model_.jacobian(points_[i], *anchor_);
    }
    if (spec_.functional) anchor_c_ = spec_.functional->gradient(*anchor_);
  }
}

bool ProbeEvaluator::deviations(const ParameterVector& theta, const ParameterVector& theta0,
                                Vector& sq, double& factor) const {
  const bool at_anchor = anchor_ && theta0 == *anchor_;
  const Vector eta0 = at_anchor ? anchor_eta_ : responses(model_, all_, theta0);
  const Vector dev2 = (responses(model_, all_, theta) - eta0).array().square().matrix();
  sq.resize(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    sq[static_cast<Eigen::Index>(i)] = dev2[static_cast<Eigen::Index>(num_idx_[i])];
  }
  double den = 0.0;
  switch (spec_.kind) {
    case CriterionKind::eE:
      den = (theta - theta0).squaredNorm();
      break;
    case CriterionKind::ec: {
      const double dg = (*spec_.functional)(theta) - (*spec_.functional)(theta0);
      den = dg * dg;
      break;
    }
    case CriterionKind::eG:
      for (std::size_t k : den_idx_) den = std::max(den, dev2[static_cast<Eigen::Index>(k)]);
      break;
    default:
      throw CriterionError(std::string("criterion ") + to_string(spec_.kind) +
                           " has no ratio form");
  }
  if (!(den > 0.0) || !std::isfinite(den)) return false;
  factor = spec_.K + 1.0 / den;
  return std::isfinite(factor);
}

std::optional<Vector> ProbeEvaluator::column(const Probe& probe) const {
  if (probe.is_limit()) {
    if (spec_.kind == CriterionKind::eG) {
      throw CriterionError("eG has no theta -> theta0 limit");
    }
    const Vector& v = *probe.direction;
    const bool at_anchor = anchor_ && probe.theta0 == *anchor_;
    Vector proj(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      proj[k] = at_anchor ? anchor_jac_.col(k).dot(v)
                          : model_.jacobian(points_[i], probe.theta0).dot(v);
    }
    double den = 0.0;
    if (spec_.kind == CriterionKind::eE) {
      den = v.squaredNorm();
    } else {
      const Vector c = at_anchor ? anchor_c_ : spec_.functional->gradient(probe.theta0);
      den = c.dot(v) * c.dot(v);
    }
    if (!(den > 0.0)) return std::nullopt;
    return Vector(proj.array().square().matrix() / den);
  }
  Vector sq;
  double factor = 0.0;
  if (!deviations(probe.theta, probe.theta0, sq, factor)) return std::nullopt;
  return Vector(sq * factor);
}

std::optional<double> ProbeEvaluator::H(const Vector& w, const Probe& probe) const {
  auto col = column(probe);
  if (!col) return std::nullopt;
  return w.dot(*col);
}

LimitValue ProbeEvaluator::limit(const Vector& w, const ParameterVector& theta0) const {
  if (spec_.kind != CriterionKind::eE && spec_.kind != CriterionKind::ec) {
    throw CriterionError(std::string("no theta -> theta0 limit for ") + to_string(spec_.kind));
  }
  const int p = model_.num_params();
  const bool at_anchor = anchor_ && theta0 == *anchor_;
  Matrix m = Matrix::Zero(p, p);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (w[k] == 0.0) continue;
    const Vector j = at_anchor ? Vector(anchor_jac_.col(k)) : model_.jacobian(points_[i], theta0);
    m.noalias() += w[k] * j * j.transpose();
  }
  m = 0.5 * (m + m.transpose());
  LimitValue out;
  if (spec_.kind == CriterionKind::eE) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    out.direction = es.eigenvectors().col(0);
    out.value = w.dot(*column(Probe{theta0, theta0, out.direction}));
    return out;
  }
  const Vector c = at_anchor ? anchor_c_ : spec_.functional->gradient(theta0);
  const Matrix g = generalized_inverse(m);
  const Vector resid = c - m * (g * c);
  if (resid.norm() > 1e-8 * std::max(1.0, c.norm())) {
    out.direction = resid;
  } else {
    out.direction = g * c;
  }
  auto col = column(Probe{theta0, theta0, out.direction});
  out.value = col ? w.dot(*col) : 0.0;
  return out;
}

DesignPoint ProbeEvaluator::argmax_x(const Probe& probe) const {
  if (spec_.kind != CriterionKind::eG || probe.is_limit()) {
    throw CriterionError("argmax_x is defined for eG pairs only");
  }
  const Vector d2 = (responses(model_, all_, probe.theta) - responses(model_, all_, probe.theta0))
                        .array()
                        .square()
                        .matrix();
  std::size_t best = den_idx_.front();
  for (std::size_t k : den_idx_) {
    if (d2[static_cast<Eigen::Index>(k)] > d2[static_cast<Eigen::Index>(best)]) best = k;
  }
  return all_[best];
}

GridCache::GridCache(const ProbeEvaluator& evaluator, std::vector<Probe> probes, double exclusion)
    : ev_(evaluator), exclusion_(exclusion), probes_(std::move(probes)) {
  const std::size_t n = probes_.size();
  sq_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ev_.size()));
  factor_.resize(static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) { add_row(probes_[i], sq_, factor_, i); });
}

void GridCache::add_row(const Probe& probe, Matrix& sq, Vector& factor, std::size_t row) {
  const auto r = static_cast<Eigen::Index>(row);
  if (probe.is_limit()) {
    auto col = ev_.column(probe);
    if (col) {
      sq.row(r) = col->transpose();
      factor[r] = 1.0;
    } else {
      sq.row(r).setZero();
      factor[r] = kInf;
    }
    return;
  }
  if ((probe.theta - probe.theta0).norm() < exclusion_) {
    factor[r] = kInf;
    sq.row(r).setZero();
    return;
  }
  Vector s;
  double f = 0.0;
  if (ev_.deviations(probe.theta, probe.theta0, s, f)) {
    sq.row(r) = s.transpose();
    factor[r] = f;
  } else {
    sq.row(r).setZero();
    factor[r] = kInf;
  }
}

Vector GridCache::values(const Vector& w) const {
  const Vector raw = sq_ * w;
  Vector out(static_cast<Eigen::Index>(size()));
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    out[i] = std::isfinite(factor_[i]) ? raw[i] * factor_[i] : kInf;
  }
  for (std::size_t j = 0; j < extra_probes_.size(); ++j) {
    const auto k = raw.size() + static_cast<Eigen::Index>(j);
    out[k] = std::isfinite(extra_factor_[j]) ? w.dot(extra_sq_[j]) * extra_factor_[j] : kInf;
  }
  return out;
}

const Probe& GridCache::probe(std::size_t i) const {
  return i < probes_.size() ? probes_[i] : extra_probes_[i - probes_.size()];
}

std::size_t GridCache::size() const { return probes_.size() + extra_probes_.size(); }

void GridCache::append(const Probe& probe) {
  Matrix sq(1, static_cast<Eigen::Index>(ev_.size()));
  Vector factor(1);
  add_row(probe, sq, factor, 0);
  extra_probes_.push_back(probe);
  extra_sq_.push_back(sq.row(0).transpose());
  extra_factor_.push_back(factor[0]);
}

std::vector<Probe> box_probes(const CriterionSpec& spec, const Box& box, const GridSpec& grid) {
  std::vector<Probe> out;
  const auto pts = make_grid(box, grid);
  if (!spec.worst_case) {
    out.reserve(pts.size());
    for (const auto& t : pts) out.push_back(Probe{t, *spec.theta0, std::nullopt});
    return out;
  }
  if (grid.kind == GridKind::LatinHypercube) {
    GridSpec second = grid;
    second.seed = stream_seed(grid.seed, 1);
    const auto other = make_grid(box, second);
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(Probe{pts[i], other[i], std::nullopt});
    return out;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i != j) out.push_back(Probe{pts[i], pts[j], std::nullopt});
    }
  }
  return out;
}

std::vector<Probe> finite_probes(const CriterionSpec& spec, const FiniteSet& set) {
  std::vector<Probe> out;
  if (!spec.worst_case) {
    for (const auto& t : set.points) out.push_back(Probe{t, *spec.theta0, std::nullopt});
    return out;
  }
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    for (std::size_t j = 0; j < set.points.size(); ++j) {
      if (i != j) out.push_back(Probe{set.points[i], set.points[j], std::nullopt});
    }
  }
  return out;
}

double guarded_H(const ProbeEvaluator& ev, const Vector& w, const Probe& probe, double exclusion) {
  if (!probe.is_limit() && (probe.theta - probe.theta0).norm() < exclusion) return kInf;
  auto h = ev.H(w, probe);
  return h ? *h : kInf;
}

SearchHit polish_probe(const ProbeEvaluator& ev, const Vector& w, const Probe& start,
                       const Box& box, double exclusion, const LocalSearchOptions& polish) {
  const double f0 = guarded_H(ev, w, start, exclusion);
  if (start.is_limit() || !std::isfinite(f0)) return SearchHit{start, f0};
  if (!ev.spec().worst_case) {
    const ParameterVector theta0 = start.theta0;
    auto f = [&](const Vector& t) { return guarded_H(ev, w, Probe{t, theta0, std::nullopt}, exclusion); };
    const auto res = minimize_in_box(f, box, start.theta, polish);
    if (res.f < f0) return SearchHit{Probe{res.x, theta0, std::nullopt}, res.f};
    return SearchHit{start, f0};
  }
  const int p = box.dim();
  Vector lo(2 * p), hi(2 * p), z0(2 * p);
  lo << box.lower, box.lower;
  hi << box.upper, box.upper;
  z0 << start.theta, start.theta0;
  const Box pair_box(lo, hi);
  auto f = [&](const Vector& z) {
    return guarded_H(ev, w, Probe{z.head(p), z.tail(p), std::nullopt}, exclusion);
  };
  const auto res = minimize_in_box(f, pair_box, z0, polish);
  if (res.f < f0) return SearchHit{Probe{res.x.head(p), res.x.tail(p), std::nullopt}, res.f};
  return SearchHit{start, f0};
}

std::vector<SearchHit> search_box(const ProbeEvaluator& ev, const Vector& w,
                                  const GridCache& cache, const Box& box, double exclusion,
                                  int starts, const LocalSearchOptions& polish,
                                  const std::vector<Probe>& seeds) {
  const Vector vals = cache.values(w);
  std::vector<std::size_t> idx;
  idx.reserve(static_cast<std::size_t>(vals.size()));
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (std::isfinite(vals[i])) idx.push_back(static_cast<std::size_t>(i));
  }
  const std::size_t k = std::min(idx.size(), static_cast<std::size_t>(std::max(starts, 1)));
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const auto va = vals[static_cast<Eigen::Index>(a)];
                      const auto vb = vals[static_cast<Eigen::Index>(b)];
                      return va < vb || (va == vb && a < b);
                    });

  std::vector<Probe> starts_list;
  for (std::size_t i = 0; i < k; ++i) starts_list.push_back(cache.probe(idx[i]));
  for (const auto& s : seeds) starts_list.push_back(s);

  std::vector<SearchHit> hits(starts_list.size());
  parallel_for(starts_list.size(), [&](std::size_t i) {
    hits[i] = polish_probe(ev, w, starts_list[i], box, exclusion, polish);
  });
  if (k > 0) {
    hits.push_back(SearchHit{cache.probe(idx[0]), vals[static_cast<Eigen::Index>(idx[0])]});
  }
  const auto& spec = ev.spec();
  if ((spec.kind == CriterionKind::eE || spec.kind == CriterionKind::ec) && !spec.worst_case) {
    const LimitValue lv = ev.limit(w, *spec.theta0);
    hits.push_back(SearchHit{Probe{*spec.theta0, *spec.theta0, lv.direction}, lv.value});
  }
  hits.erase(std::remove_if(hits.begin(), hits.end(),
                            [](const SearchHit& h) { return !std::isfinite(h.value); }),
             hits.end());
  if (hits.empty()) throw CriterionError("no admissible parameter: every constraint is vacuous");
  std::stable_sort(hits.begin(), hits.end(),
                   [](const SearchHit& a, const SearchHit& b) { return a.value < b.value; });
  return hits;
}

}  // namespace extdesign::detail
