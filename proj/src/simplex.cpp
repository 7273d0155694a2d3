#include "rfr/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rfr {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

LpProblem::LpProblem(Index n_vars)
    : cost(Vector::Zero(n_vars)),
      a_eq(0, n_vars),
      b_eq(0),
      a_ub(0, n_vars),
      b_ub(0),
      lower(Vector::Zero(n_vars)),
      upper(Vector::Constant(n_vars, kInf)) {}

namespace {

// x_j = offset_j + sign_j * z[pos_j] - z[neg_j]   (neg_j < 0 when absent)
struct VariableMap {
  double offset = 0.0;
  double sign = 1.0;
  Index pos = -1;
  Index neg = -1;
};

enum class LoopResult { Optimal, Unbounded, IterationLimit };

class Tableau {
 public:
  Tableau(Index rows, Index cols) : t_(Matrix::Zero(rows + 1, cols + 1)), basis_(rows, -1), active_(rows, true) {}

  Matrix& t() { return t_; }
  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  Index rhs() const { return t_.cols() - 1; }
  Index obj() const { return t_.rows() - 1; }
  std::vector<Index>& basis() { return basis_; }
  std::vector<bool>& active() { return active_; }

  void pivot(Index r, Index e) {
    const double piv = t_(r, e);
    t_.row(r) /= piv;
    Vector col = t_.col(e);
    col(r) = 0.0;
    const Eigen::RowVectorXd prow = t_.row(r);
    t_.noalias() -= col * prow;
    t_.col(e).setZero();
    t_(r, e) = 1.0;
    basis_[r] = e;
  }

  LoopResult iterate(const std::vector<bool>& eligible, int cap, int& iterations, int& degenerate, bool& bland) {
    const NumericConfig& cfg = numeric_config();
    while (true) {
      if (iterations >= cap) return LoopResult::IterationLimit;

      Index enter = -1;
      double best = -cfg.optimality;
      for (Index j = 0; j < cols(); ++j) {
        if (!eligible[j]) continue;
        const double d = t_(obj(), j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return LoopResult::Optimal;

      Index leave = -1;
      double min_ratio = kInf;
      for (Index i = 0; i < rows(); ++i) {
        if (!active_[i]) continue;
        const double a = t_(i, enter);
        if (a <= cfg.ratio_pivot) continue;
        const double ratio = std::max(t_(i, rhs()), 0.0) / a;
        if (leave < 0 || ratio < min_ratio - 1e-12) {
          leave = i;
          min_ratio = ratio;
        } else if (ratio <= min_ratio + 1e-12) {
          const bool take = bland ? basis_[i] < basis_[leave] : a > t_(leave, enter);
          if (take) {
            leave = i;
            min_ratio = std::min(ratio, min_ratio);
          }
        }
      }
      if (leave < 0) return LoopResult::Unbounded;

      pivot(leave, enter);
      ++iterations;
      if (min_ratio <= cfg.feasibility && ++degenerate >= cfg.bland_after_degenerate) bland = true;
    }
  }

 private:
  Matrix t_;
  std::vector<Index> basis_;
  std::vector<bool> active_;
};

void check_dimensions(const LpProblem& p) {
  const Index n = p.num_vars();
  auto fail = [](const std::string& what) { throw std::invalid_argument("solve_lp: " + what); };
  if (p.lower.size() != n || p.upper.size() != n) fail("bound vectors do not match cost length");
  if (p.a_eq.rows() != p.b_eq.size() || (p.a_eq.rows() > 0 && p.a_eq.cols() != n)) fail("equality system shape");
  if (p.a_ub.rows() != p.b_ub.size() || (p.a_ub.rows() > 0 && p.a_ub.cols() != n)) fail("inequality system shape");
  for (Index j = 0; j < n; ++j) {
    if (p.lower(j) > p.upper(j)) fail("lower bound exceeds upper bound for variable " + std::to_string(j));
    if (p.lower(j) == kInf || p.upper(j) == -kInf) fail("bound at wrong infinity for variable " + std::to_string(j));
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  check_dimensions(problem);
  const NumericConfig& cfg = numeric_config();
  const Index n = problem.num_vars();
  const Index m_ub = problem.a_ub.rows();
  const Index m_eq = problem.a_eq.rows();

  // Map each variable onto nonnegative structural columns.
  std::vector<VariableMap> vars(n);
  std::vector<Index> boxed;
  Index ns = 0;
  for (Index j = 0; j < n; ++j) {
    const double lo = problem.lower(j);
    const double hi = problem.upper(j);
    VariableMap& v = vars[j];
    if (std::isfinite(lo)) {
      v.offset = lo;
      v.pos = ns++;
      if (std::isfinite(hi)) boxed.push_back(j);
    } else if (std::isfinite(hi)) {
      v.offset = hi;
      v.sign = -1.0;
      v.pos = ns++;
    } else {
      v.pos = ns++;
      v.neg = ns++;
    }
  }

  const Index m_box = static_cast<Index>(boxed.size());
  const Index m = m_ub + m_box + m_eq;
  const Index n_slack = m_ub + m_box;

  Vector offsets(n);
  for (Index j = 0; j < n; ++j) offsets(j) = vars[j].offset;

  // Rows in structural + slack columns.
  Matrix a = Matrix::Zero(m, ns + n_slack);
  Vector r(m);
  auto fill_row = [&](Index row, const auto& coeffs, double rhs) {
    for (Index j = 0; j < n; ++j) {
      const double c = coeffs(j);
      if (c == 0.0) continue;
      a(row, vars[j].pos) += c * vars[j].sign;
      if (vars[j].neg >= 0) a(row, vars[j].neg) -= c;
    }
    r(row) = rhs - coeffs.dot(offsets);
  };
  for (Index i = 0; i < m_ub; ++i) {
    fill_row(i, problem.a_ub.row(i).transpose(), problem.b_ub(i));
    a(i, ns + i) = 1.0;
  }
  for (Index k = 0; k < m_box; ++k) {
    const Index j = boxed[k];
    const Index row = m_ub + k;
    a(row, vars[j].pos) = 1.0;
    a(row, ns + row) = 1.0;
    r(row) = problem.upper(j) - problem.lower(j);
  }
  for (Index i = 0; i < m_eq; ++i) fill_row(m_ub + m_box + i, problem.a_eq.row(i).transpose(), problem.b_eq(i));

  // Rows with a usable slack start basic; the rest receive an artificial.
  std::vector<Index> needs_artificial;
  std::vector<Index> slack_basic(m, -1);
  for (Index i = 0; i < m; ++i) {
    const bool has_slack = i < n_slack;
    if (r(i) < 0.0) {
      a.row(i) *= -1.0;
      r(i) = -r(i);
      needs_artificial.push_back(i);
    } else if (has_slack) {
      slack_basic[i] = ns + i;
    } else {
      needs_artificial.push_back(i);
    }
  }
  const Index n_art = static_cast<Index>(needs_artificial.size());
  const Index n_cols = ns + n_slack + n_art;

  Tableau tab(m, n_cols);
  Matrix& t = tab.t();
  t.topLeftCorner(m, ns + n_slack) = a;
  t.col(tab.rhs()).head(m) = r;
  for (Index i = 0; i < m; ++i) tab.basis()[i] = slack_basic[i];
  for (Index k = 0; k < n_art; ++k) {
    const Index row = needs_artificial[k];
    t(row, ns + n_slack + k) = 1.0;
    tab.basis()[row] = ns + n_slack + k;
  }

  std::vector<bool> eligible(n_cols, true);
  for (Index k = 0; k < n_art; ++k) eligible[ns + n_slack + k] = false;

  LpSolution sol;
  const int cap = cfg.iteration_factor * static_cast<int>(n_cols + m);
  int iterations = 0;
  int degenerate = 0;
  bool bland = false;

  if (n_art > 0) {
    for (Index row : needs_artificial) t.row(tab.obj()) -= t.row(row);
    for (Index k = 0; k < n_art; ++k) t(tab.obj(), ns + n_slack + k) = 0.0;
    const LoopResult phase1 = tab.iterate(eligible, cap, iterations, degenerate, bland);
    sol.iterations = iterations;
    if (phase1 == LoopResult::IterationLimit) {
      sol.status = LpStatus::IterationLimit;
      return sol;
    }
    sol.infeasibility = std::max(0.0, -t(tab.obj(), tab.rhs()));
    const double scale = 1.0 + (r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0);
    if (sol.infeasibility > cfg.feasibility * scale) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive remaining artificials out of the basis; rows that cannot be
    // pivoted are linearly dependent and are dropped.
    for (Index i = 0; i < m; ++i) {
      if (tab.basis()[i] < ns + n_slack) continue;
      Index best = -1;
      double best_mag = 1e-9;
      for (Index j = 0; j < ns + n_slack; ++j) {
        const double mag = std::abs(t(i, j));
        if (mag > best_mag) {
          best_mag = mag;
          best = j;
        }
      }
      if (best >= 0) {
        tab.pivot(i, best);
      } else {
        tab.active()[i] = false;
        t.row(i).setZero();
      }
    }
  }

  // Phase 2.
  Vector cost = Vector::Zero(n_cols);
  const double direction = problem.sense == Sense::Maximize ? -1.0 : 1.0;
  for (Index j = 0; j < n; ++j) {
    const double c = direction * problem.cost(j);
    cost(vars[j].pos) += c * vars[j].sign;
    if (vars[j].neg >= 0) cost(vars[j].neg) -= c;
  }
  t.row(tab.obj()).setZero();
  t.row(tab.obj()).head(n_cols) = cost.transpose();
  for (Index i = 0; i < m; ++i) {
    if (!tab.active()[i]) continue;
    const double cb = cost(tab.basis()[i]);
    if (cb != 0.0) t.row(tab.obj()) -= cb * t.row(i);
  }

  const LoopResult phase2 = tab.iterate(eligible, cap, iterations, degenerate, bland);
  sol.iterations = iterations;
  if (phase2 == LoopResult::IterationLimit) {
    sol.status = LpStatus::IterationLimit;
    return sol;
  }
  if (phase2 == LoopResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  Vector z = Vector::Zero(n_cols);
  for (Index i = 0; i < m; ++i) {
    if (tab.active()[i]) z(tab.basis()[i]) = std::max(0.0, t(i, tab.rhs()));
  }
  sol.x.resize(n);
  for (Index j = 0; j < n; ++j) {
    const VariableMap& v = vars[j];
    sol.x(j) = v.offset + v.sign * z(v.pos) - (v.neg >= 0 ? z(v.neg) : 0.0);
  }
  sol.objective = problem.cost.dot(sol.x);
  sol.status = LpStatus::Optimal;
  return sol;
}

}  // namespace rfr
