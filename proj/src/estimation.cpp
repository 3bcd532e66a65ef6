#include "extdesign/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "extdesign/parallel.hpp"

namespace extdesign {

void ObservationSet::validate() const {
  if (static_cast<Eigen::Index>(x.size()) != y.size()) {
    throw DesignError("observations: " + std::to_string(x.size()) + " points but " +
                      std::to_string(y.size()) + " responses");
  }
  if (!(sigma >= 0.0)) throw DesignError("observations: sigma must be nonnegative");
}

std::vector<DesignPoint> replicate_design(const DesignMeasure& xi, int n) {
  if (n < 1) throw DesignError("replicate_design: n must be positive");
  const auto k = xi.size();
  std::vector<int> counts(k);
  std::vector<double> frac(k);
  int used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double target = n * xi.weight(i) / xi.mass();
    counts[i] = static_cast<int>(std::floor(target));
    frac[i] = target - counts[i];
    used += counts[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; used < n; ++i, ++used) ++counts[order[i % k]];
  std::vector<DesignPoint> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (int r = 0; r < counts[i]; ++r) out.push_back(xi.point(i));
  }
  return out;
}

ObservationSet simulate_observations(const RegressionModel& model,
                                     const std::vector<DesignPoint>& x,
                                     const ParameterVector& theta, double sigma,
                                     std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw DesignError("simulate: sigma must be nonnegative");
  ObservationSet obs;
  obs.x = x;
  obs.sigma = sigma;
  obs.seed = seed;
  obs.y.resize(static_cast<Eigen::Index>(x.size()));
  Rng rng(seed);
  for (std::size_t i = 0; i < x.size(); ++i) {
    obs.y[static_cast<Eigen::Index>(i)] = model.response(x[i], theta) + sigma * rng.normal();
  }
  return obs;
}

double residual_ss(const RegressionModel& model, const ObservationSet& obs,
                   const ParameterVector& theta) {
  double s = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double r = obs.y[static_cast<Eigen::Index>(i)] - model.response(obs.x[i], theta);
    s += r * r;
  }
  return s;
}

FitResult ls_fit_multistart(const RegressionModel& model, const ObservationSet& obs,
                            const Box& box, const FitOptions& options) {
  obs.validate();
  if (options.starts < 1) throw DesignError("fit: at least one start is needed");
  if (box.dim() != model.num_params()) throw DesignError("fit: box dimension mismatch");

  auto rss = [&](const Vector& th) {
    const double v = residual_ss(model, obs, th);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  auto grad = [&](const Vector& th) {
    Vector g = Vector::Zero(model.num_params());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double r = obs.y[static_cast<Eigen::Index>(i)] - model.response(obs.x[i], th);
      g -= 2.0 * r * model.jacobian(obs.x[i], th);
    }
    return g;
  };
  const auto starts = lhs_sample(box, options.starts, options.seed);
  std::vector<LocalSearchResult> runs(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    try {
      runs[i] = minimize_in_box(rss, box, starts[i], options.local, grad);
    } catch (const Error&) {
      runs[i].f = std::numeric_limits<double>::infinity();
    }
  });

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (std::isfinite(runs[i].f)) order.push_back(i);
  }
  if (order.empty()) throw NumericError("fit: every local descent failed");
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return runs[a].f < runs[b].f; });

  const double radius = options.cluster_radius * box.diameter();
  FitResult out;
  for (std::size_t i : order) {
    bool merged = false;
    for (auto& m : out.local_minima) {
      if ((m.theta - runs[i].x).norm() <= radius) {
        ++m.hits;
        merged = true;
        break;
      }
    }
    if (!merged) out.local_minima.push_back(LocalMinimum{runs[i].x, std::sqrt(runs[i].f), 1});
  }
  out.theta = out.local_minima.front().theta;
  out.residual = out.local_minima.front().residual;
  out.global = true;
  return out;
}

double localization_radius(const RegressionModel& model, const ObservationSet& obs,
                           const ParameterVector& theta, double phi_eE) {
  obs.validate();
  if (obs.size() == 0) throw DesignError("localization radius: no observations");
  if (!(phi_eE >= 0.0)) throw CriterionError("localization radius: phi_eE must be nonnegative");
  const double r = std::sqrt(residual_ss(model, obs, theta));
  if (phi_eE == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * r / (std::sqrt(static_cast<double>(obs.size())) * std::sqrt(phi_eE));
}

}  // namespace extdesign
