#include "extdesign/design.hpp"

#include <cmath>
#include <string>

namespace extdesign {

bool same_point(const DesignPoint& a, const DesignPoint& b, double tol) {
  if (a.size() != b.size()) return false;
  return ((a - b).array().abs() <= tol).all();
}

DesignMeasure DesignMeasure::unchecked(std::vector<DesignPoint> support, Vector weights) {
  if (support.size() != static_cast<std::size_t>(weights.size())) {
    throw DesignError("design: support and weights have different lengths");
  }
  DesignMeasure xi;
  xi.support_ = std::move(support);
  xi.weights_ = std::move(weights);
  return xi;
}

DesignMeasure DesignMeasure::scaled(double a) const { return unchecked(support_, a * weights_); }

DesignMeasure DesignMeasure::mix(const DesignMeasure& other, double alpha) const {
  std::vector<DesignPoint> pts = support_;
  std::vector<double> w(weights_.data(), weights_.data() + weights_.size());
  for (double& v : w) v *= 1.0 - alpha;
  for (std::size_t j = 0; j < other.size(); ++j) {
    bool merged = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (same_point(pts[i], other.point(j))) {
        w[i] += alpha * other.weight(j);
        merged = true;
        break;
      }
    }
    if (!merged) {
      pts.push_back(other.point(j));
      w.push_back(alpha * other.weight(j));
    }
  }
  return unchecked(std::move(pts), Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
}

DesignMeasure validate_design(const std::vector<DesignPoint>& support, const Vector& weights,
                              const ValidateOptions& options) {
  if (support.size() != static_cast<std::size_t>(weights.size())) {
    throw DesignError("design: support has " + std::to_string(support.size()) +
                      " points but " + std::to_string(weights.size()) + " weights were given");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i])) throw DesignError("design: non-finite weight");
    if (weights[i] < -options.tol) {
      throw DesignError("design: negative weight " + std::to_string(weights[i]) + " at index " +
                        std::to_string(i));
    }
    if (!support[static_cast<std::size_t>(i)].allFinite()) {
      throw DesignError("design: non-finite support point");
    }
  }
  const double total = weights.sum();
  if (!options.renormalize && std::abs(total - 1.0) > options.tol) {
    throw DesignError("design: weights sum to " + std::to_string(total) + ", expected 1");
  }
  std::vector<DesignPoint> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double wi = std::max(0.0, weights[static_cast<Eigen::Index>(i)]);
    bool merged = false;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (same_point(pts[j], support[i])) {
        w[j] += wi;
        merged = true;
        break;
      }
    }
    if (!merged) {
      pts.push_back(support[i]);
      w.push_back(wi);
    }
  }
  std::vector<DesignPoint> kept;
  std::vector<double> kept_w;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (w[j] >= kWeightPruneThreshold) {
      kept.push_back(pts[j]);
      kept_w.push_back(w[j]);
    }
  }
  if (kept.empty()) throw DesignError("design: empty support after pruning");
  Vector out = Eigen::Map<Vector>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
  out /= out.sum();
  return DesignMeasure::unchecked(std::move(kept), std::move(out));
}

DesignMeasure uniform_design(const std::vector<DesignPoint>& support) {
  if (support.empty()) throw DesignError("design: empty support");
  const auto n = static_cast<Eigen::Index>(support.size());
  return validate_design(support, Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

DesignMeasure design_from_weights(const DesignSpace& space, const Vector& weights) {
  ValidateOptions opts;
  opts.tol = 1e-7;
  opts.renormalize = true;
  return validate_design(space, weights, opts);
}

DesignMeasure merge_close_points(const DesignMeasure& xi, double radius) {
  if (!(radius >= 0.0)) throw DesignError("merge_close_points: radius must be nonnegative");
  const std::size_t n = xi.size();
  std::vector<std::size_t> group(n);
  for (std::size_t i = 0; i < n; ++i) group[i] = i;
  auto root = [&](std::size_t i) {
    while (group[i] != i) i = group[i] = group[group[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((xi.point(i) - xi.point(j)).norm() <= radius) group[root(j)] = root(i);
    }
  }
  std::vector<DesignPoint> pts;
  std::vector<double> wts;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = root(i);
    if (slot[r] == n) {
      slot[r] = pts.size();
      pts.push_back(DesignPoint::Zero(xi.point(i).size()));
      wts.push_back(0.0);
    }
    pts[slot[r]] += xi.weight(i) * xi.point(i);
    wts[slot[r]] += xi.weight(i);
  }
  Vector w(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (wts[k] > 0.0) pts[k] /= wts[k];
    w[static_cast<Eigen::Index>(k)] = wts[k];
  }
  return DesignMeasure::unchecked(std::move(pts), std::move(w));
}

double l2_norm_sq(const DesignMeasure& xi, const Vector& values) {
  if (values.size() != static_cast<Eigen::Index>(xi.size())) {
    throw DesignError("l2_norm_sq: value count does not match the support");
  }
  if (!values.allFinite()) throw NumericError("l2_norm_sq: non-finite function value");
  return xi.weights().dot(values.cwiseAbs2());
}

double l2_norm_sq(const DesignMeasure& xi, const std::function<double(const DesignPoint&)>& f) {
  Vector values(static_cast<Eigen::Index>(xi.size()));
  for (std::size_t i = 0; i < xi.size(); ++i) values[static_cast<Eigen::Index>(i)] = f(xi.point(i));
  return l2_norm_sq(xi, values);
}

Matrix info_matrix(const RegressionModel& model, const DesignMeasure& xi,
                   const ParameterVector& theta) {
  const int p = model.num_params();
  Matrix m = Matrix::Zero(p, p);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const Vector j = model.jacobian(xi.point(i), theta);
    m.noalias() += xi.weight(i) * (j * j.transpose());
  }
  return 0.5 * (m + m.transpose());
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace extdesign
