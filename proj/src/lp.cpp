#include "extdesign/lp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace extdesign {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Unbounded:
      return "unbounded";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::IterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;

// Equality-form problem: minimize cost^T x, s x = rhs, x >= 0, rhs >= 0.
class RevisedSimplex {
 public:
  RevisedSimplex(Matrix s, Vector rhs, const LpOptions& options)
      : s_(std::move(s)), rhs_(std::move(rhs)), opt_(options) {}

  void set_basis(std::vector<int> basis) {
    basis_ = std::move(basis);
    is_basic_.assign(static_cast<std::size_t>(s_.cols()), 0);
    for (int j : basis_) is_basic_[static_cast<std::size_t>(j)] = 1;
    refactor();
  }

  // Runs simplex iterations on the given cost; `allowed` marks enterable columns.
  LpStatus run(const Vector& cost, const std::vector<char>& allowed) {
    const auto rows = static_cast<int>(s_.rows());
    const auto cols = static_cast<int>(s_.cols());
    const long degenerate_limit = 10L * (rows + cols);
    long degenerate_run = 0;
    int since_refactor = 0;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::IterationLimit;
      if (since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
      Vector cb(rows);
      for (int i = 0; i < rows; ++i) cb[i] = cost[basis_[static_cast<std::size_t>(i)]];
      const Vector y = binv_.transpose() * cb;
      const Vector reduced = cost - s_.transpose() * y;

      int enter = -1;
      double best = -opt_.optimality_tol;
      for (int j = 0; j < cols; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] || !allowed[static_cast<std::size_t>(j)]) continue;
        if (reduced[j] < best) {
          enter = j;
          if (bland_) break;
          best = reduced[j];
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      const Vector alpha = binv_ * s_.col(enter);
      int leave = -1;
      double min_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows; ++i) {
        if (alpha[i] <= kPivotTol) continue;
        const double ratio = std::max(xb_[i], 0.0) / alpha[i];
        if (leave < 0 || ratio < min_ratio - 1e-12) {
          leave = i;
          min_ratio = ratio;
        } else if (ratio <= min_ratio + 1e-12) {
          const bool better =
              bland_ ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                     : alpha[i] > alpha[leave];
          if (better) {
            leave = i;
            min_ratio = std::min(min_ratio, ratio);
          }
        }
      }
      if (leave < 0) return LpStatus::Unbounded;

      pivot(enter, leave, alpha, min_ratio);
      ++iterations_;
      ++since_refactor;
      if (min_ratio <= opt_.feasibility_tol) {
        if (++degenerate_run > degenerate_limit) bland_ = true;
      } else {
        degenerate_run = 0;
      }
    }
  }

  void pivot(int enter, int leave, const Vector& alpha, double step) {
    xb_ -= step * alpha;
    xb_[leave] = step;
    const Eigen::RowVectorXd prow = binv_.row(leave) / alpha[leave];
    binv_.noalias() -= alpha * prow;
    binv_.row(leave) = prow;
    is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = 0;
    basis_[static_cast<std::size_t>(leave)] = enter;
    is_basic_[static_cast<std::size_t>(enter)] = 1;
  }

  void refactor() {
    const auto rows = static_cast<int>(s_.rows());
    Matrix b(rows, rows);
    for (int i = 0; i < rows; ++i) b.col(i) = s_.col(basis_[static_cast<std::size_t>(i)]);
    binv_ = b.partialPivLu().inverse();
    xb_ = binv_ * rhs_;
    for (int i = 0; i < rows; ++i) {
      if (xb_[i] < 0.0 && xb_[i] > -opt_.feasibility_tol) xb_[i] = 0.0;
    }
  }

  Vector solution() const {
    Vector x = Vector::Zero(s_.cols());
    for (std::size_t i = 0; i < basis_.size(); ++i) x[basis_[i]] = xb_[static_cast<Eigen::Index>(i)];
    return x;
  }

  Vector multipliers(const Vector& cost) const {
    Vector cb(s_.rows());
    for (std::size_t i = 0; i < basis_.size(); ++i) cb[static_cast<Eigen::Index>(i)] = cost[basis_[i]];
    return binv_.transpose() * cb;
  }

  const std::vector<int>& basis() const { return basis_; }
  const Matrix& binv() const { return binv_; }
  const Matrix& matrix() const { return s_; }
  int iterations() const { return iterations_; }
  bool bland() const { return bland_; }

 private:
  Matrix s_;
  Vector rhs_;
  LpOptions opt_;
  std::vector<int> basis_;
  std::vector<char> is_basic_;
  Matrix binv_;
  Vector xb_;
  int iterations_ = 0;
  bool bland_ = false;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& options) {
  const auto rows = static_cast<int>(lp.a.rows());
  const auto nvar = static_cast<int>(lp.a.cols());
  if (lp.b.size() != rows || lp.c.size() != nvar ||
      lp.sense.size() != static_cast<std::size_t>(rows)) {
    throw Error("solve_lp: inconsistent problem dimensions");
  }
  if (!lp.a.allFinite() || !lp.b.allFinite() || !lp.c.allFinite()) {
    throw NumericError("solve_lp: non-finite problem data");
  }
  const bool has_free = !lp.free_vars.empty();
  if (has_free && lp.free_vars.size() != static_cast<std::size_t>(nvar)) {
    throw Error("solve_lp: free_vars has the wrong length");
  }

  // Column layout: originals, negative parts of free variables, slacks, artificials.
  std::vector<int> neg_of(static_cast<std::size_t>(nvar), -1);
  int ncols = nvar;
  for (int j = 0; j < nvar; ++j) {
    if (has_free && lp.free_vars[static_cast<std::size_t>(j)]) neg_of[static_cast<std::size_t>(j)] = ncols++;
  }
  std::vector<int> slack_of(static_cast<std::size_t>(rows), -1);
  for (int i = 0; i < rows; ++i) {
    if (lp.sense[static_cast<std::size_t>(i)] != RowSense::Equal) slack_of[static_cast<std::size_t>(i)] = ncols++;
  }
  std::vector<double> sign(static_cast<std::size_t>(rows), 1.0);
  for (int i = 0; i < rows; ++i) {
    if (lp.b[i] < 0.0) sign[static_cast<std::size_t>(i)] = -1.0;
  }
  std::vector<int> basis(static_cast<std::size_t>(rows), -1);
  std::vector<int> artificial_rows;
  for (int i = 0; i < rows; ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (slack_of[si] >= 0) {
      const double coef = (lp.sense[si] == RowSense::LessEqual ? 1.0 : -1.0) * sign[si];
      if (coef > 0.0) {
        basis[si] = slack_of[si];
        continue;
      }
    }
    artificial_rows.push_back(i);
  }
  const int first_artificial = ncols;
  ncols += static_cast<int>(artificial_rows.size());

  Matrix s = Matrix::Zero(rows, ncols);
  Vector rhs(rows);
  for (int i = 0; i < rows; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const double sg = sign[si];
    for (int j = 0; j < nvar; ++j) {
      s(i, j) = sg * lp.a(i, j);
      if (neg_of[static_cast<std::size_t>(j)] >= 0) s(i, neg_of[static_cast<std::size_t>(j)]) = -sg * lp.a(i, j);
    }
    if (slack_of[si] >= 0) {
      s(i, slack_of[si]) = sg * (lp.sense[si] == RowSense::LessEqual ? 1.0 : -1.0);
    }
    rhs[i] = sg * lp.b[i];
  }
  for (std::size_t k = 0; k < artificial_rows.size(); ++k) {
    const int col = first_artificial + static_cast<int>(k);
    s(artificial_rows[k], col) = 1.0;
    basis[static_cast<std::size_t>(artificial_rows[k])] = col;
  }

  Vector cost = Vector::Zero(ncols);
  for (int j = 0; j < nvar; ++j) {
    cost[j] = -lp.c[j];
    if (neg_of[static_cast<std::size_t>(j)] >= 0) cost[neg_of[static_cast<std::size_t>(j)]] = lp.c[j];
  }

  RevisedSimplex simplex(std::move(s), rhs, options);
  simplex.set_basis(basis);
  std::vector<char> allowed(static_cast<std::size_t>(ncols), 1);
  LpResult result;

  if (!artificial_rows.empty()) {
    Vector phase1 = Vector::Zero(ncols);
    for (int j = first_artificial; j < ncols; ++j) phase1[j] = 1.0;
    const LpStatus st = simplex.run(phase1, allowed);
    if (st == LpStatus::IterationLimit) {
      result.status = st;
      result.iterations = simplex.iterations();
      return result;
    }
    const double infeas = phase1.dot(simplex.solution());
    if (infeas > options.feasibility_tol * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) {
      result.status = LpStatus::Infeasible;
      result.iterations = simplex.iterations();
      return result;
    }
    // Drive zero-valued artificials out of the basis where possible.
    for (int i = 0; i < rows; ++i) {
      if (simplex.basis()[static_cast<std::size_t>(i)] < first_artificial) continue;
      const Eigen::RowVectorXd row = simplex.binv().row(i) * simplex.matrix();
      for (int j = 0; j < first_artificial; ++j) {
        bool basic = false;
        for (int bj : simplex.basis()) basic = basic || bj == j;
        if (!basic && std::abs(row[j]) > kPivotTol) {
          const Vector alpha = simplex.binv() * simplex.matrix().col(j);
          simplex.pivot(j, i, alpha, 0.0);
          break;
        }
      }
    }
    simplex.refactor();
    for (int j = first_artificial; j < ncols; ++j) allowed[static_cast<std::size_t>(j)] = 0;
  }

  const LpStatus st = simplex.run(cost, allowed);
  simplex.refactor();
  result.status = st;
  result.iterations = simplex.iterations();
  result.used_bland = simplex.bland();
  const Vector xs = simplex.solution();
  result.x = xs.head(nvar);
  for (int j = 0; j < nvar; ++j) {
    if (neg_of[static_cast<std::size_t>(j)] >= 0) result.x[j] -= xs[neg_of[static_cast<std::size_t>(j)]];
  }
  result.objective = lp.c.dot(result.x);
  const Vector pi = simplex.multipliers(cost);
  result.duals.resize(rows);
  for (int i = 0; i < rows; ++i) result.duals[i] = -sign[static_cast<std::size_t>(i)] * pi[i];
  return result;
}

std::string to_text(const LinearProgram& lp) {
  std::ostringstream out;
  out.precision(17);
  out << "maximize " << lp.a.rows() << " rows " << lp.a.cols() << " cols\n";
  out << "c:";
  for (Eigen::Index j = 0; j < lp.c.size(); ++j) out << ' ' << lp.c[j];
  out << '\n';
  for (Eigen::Index i = 0; i < lp.a.rows(); ++i) {
    for (Eigen::Index j = 0; j < lp.a.cols(); ++j) out << lp.a(i, j) << ' ';
    switch (lp.sense[static_cast<std::size_t>(i)]) {
      case RowSense::LessEqual:
        out << "<=";
        break;
      case RowSense::GreaterEqual:
        out << ">=";
        break;
      case RowSense::Equal:
        out << "==";
        break;
    }
    out << ' ' << lp.b[i] << '\n';
  }
  if (!lp.free_vars.empty()) {
    out << "free:";
    for (std::size_t j = 0; j < lp.free_vars.size(); ++j) {
      if (lp.free_vars[j]) out << ' ' << j;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

Vector to_probability(Vector v) {
  v = v.cwiseMax(0.0);
  const double total = v.sum();
  if (total > 0.0) v /= total;
  return v;
}

}  // namespace

MaximinSolution solve_maximin(const MaximinLP& problem, LpForm form, const LpOptions& options) {
  const Matrix& h = problem.h;
  const auto ell = static_cast<int>(h.rows());
  const auto m = static_cast<int>(h.cols());
  if (ell < 1 || m < 1) throw Error("solve_maximin: empty constraint matrix");
  if (!h.allFinite()) throw NumericError("solve_maximin: non-finite constraint matrix");
  for (const auto& e : problem.extra) {
    if (e.coeffs.size() != ell) throw Error("solve_maximin: extra constraint has wrong length");
  }
  if (form == LpForm::Auto) form = (problem.extra.empty() && ell <= m) ? LpForm::Dual : LpForm::Primal;
  if (form == LpForm::Dual && !problem.extra.empty()) {
    throw Error("solve_maximin: the dual form does not support extra constraints");
  }

  MaximinSolution sol;
  // min_j max_i |h_ij| bounds |t| from above, so the scaled optimum is O(1).
  double scale = h.cwiseAbs().colwise().maxCoeff().minCoeff();
  if (scale == 0.0) scale = h.cwiseAbs().maxCoeff();
  if (scale == 0.0 && problem.extra.empty()) {
    sol.status = LpStatus::Optimal;
    sol.w = Vector::Constant(ell, 1.0 / ell);
    sol.mu = Vector::Constant(m, 1.0 / m);
    sol.t = 0.0;
    return sol;
  }
  const Matrix hs = scale > 0.0 ? Matrix(h / scale) : h;
  const double unscale = scale > 0.0 ? scale : 1.0;

  LinearProgram lp;
  if (form == LpForm::Dual) {
    // Variables (mu_1..mu_m, z); maximize -z.
    lp.a = Matrix::Zero(ell + 1, m + 1);
    lp.a.topLeftCorner(ell, m) = hs;
    lp.a.block(0, m, ell, 1).setConstant(-1.0);
    lp.a.block(ell, 0, 1, m).setOnes();
    lp.b = Vector::Zero(ell + 1);
    lp.b[ell] = 1.0;
    lp.c = Vector::Zero(m + 1);
    lp.c[m] = -1.0;
    lp.sense.assign(static_cast<std::size_t>(ell), RowSense::LessEqual);
    lp.sense.push_back(RowSense::Equal);
    lp.free_vars.assign(static_cast<std::size_t>(m + 1), false);
    lp.free_vars[static_cast<std::size_t>(m)] = true;
    const LpResult r = solve_lp(lp, options);
    sol.status = r.status;
    if (r.status != LpStatus::Optimal) return sol;
    sol.mu = to_probability(r.x.head(m));
    sol.w = to_probability(r.duals.head(ell));
    sol.t = r.x[m] * unscale;
    return sol;
  }

  // Variables (w_1..w_ell, t); maximize t.
  const int k = static_cast<int>(problem.extra.size());
  lp.a = Matrix::Zero(m + k + 1, ell + 1);
  lp.a.topLeftCorner(m, ell) = hs.transpose();
  lp.a.block(0, ell, m, 1).setConstant(-1.0);
  for (int e = 0; e < k; ++e) lp.a.block(m + e, 0, 1, ell) = problem.extra[static_cast<std::size_t>(e)].coeffs.transpose();
  lp.a.block(m + k, 0, 1, ell).setOnes();
  lp.b = Vector::Zero(m + k + 1);
  for (int e = 0; e < k; ++e) lp.b[m + e] = problem.extra[static_cast<std::size_t>(e)].bound;
  lp.b[m + k] = 1.0;
  lp.c = Vector::Zero(ell + 1);
  lp.c[ell] = 1.0;
  lp.sense.assign(static_cast<std::size_t>(m), RowSense::GreaterEqual);
  for (int e = 0; e < k; ++e) lp.sense.push_back(RowSense::LessEqual);
  lp.sense.push_back(RowSense::Equal);
  lp.free_vars.assign(static_cast<std::size_t>(ell + 1), false);
  lp.free_vars[static_cast<std::size_t>(ell)] = true;
  const LpResult r = solve_lp(lp, options);
  sol.status = r.status;
  if (r.status != LpStatus::Optimal) return sol;
  sol.w = to_probability(r.x.head(ell));
  sol.mu = to_probability(-r.duals.head(m));
  sol.t = r.x[ell] * unscale;
  return sol;
}

MinmaxSolution solve_minmax_measure(const Matrix& psi, const LpOptions& options) {
  if (psi.cols() < 1 || psi.rows() < 1) throw Error("solve_minmax_measure: empty matrix");
  MinmaxSolution out;
  if (psi.cols() == 1) {
    out.mu = Vector::Ones(1);
    out.value = psi.col(0).maxCoeff();
    return out;
  }
  MaximinLP game{psi, {}};
  const MaximinSolution s = solve_maximin(game, LpForm::Auto, options);
  if (s.status != LpStatus::Optimal) {
    throw NumericError(std::string("solve_minmax_measure: LP ended with status ") + to_string(s.status));
  }
  out.mu = s.mu;
  out.value = s.t;
  return out;
}

}  // namespace extdesign
