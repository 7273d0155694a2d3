#include "rfr/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rfr {

void Polytope::check() const {
  if (G.rows() != g.size()) throw std::invalid_argument("polytope: G and g row counts differ");
  if (static_cast<Index>(labels.size()) != G.rows()) throw std::invalid_argument("polytope: label count mismatch");
  if (!columns.empty() && static_cast<Index>(columns.size()) != G.cols()) {
    throw std::invalid_argument("polytope: column name count mismatch");
  }
  if (G.rows() < 1) throw std::invalid_argument("polytope: no rows");
  if (!G.allFinite() || !g.allFinite()) throw std::invalid_argument("polytope: non-finite entries");
}

Polytope Polytope::subset_rows(const std::vector<Index>& keep) const {
  Polytope out;
  out.G.resize(static_cast<Index>(keep.size()), G.cols());
  out.g.resize(static_cast<Index>(keep.size()));
  out.columns = columns;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.G.row(static_cast<Index>(k)) = G.row(keep[k]);
    out.g(static_cast<Index>(k)) = g(keep[k]);
    out.labels.push_back(labels[keep[k]]);
  }
  return out;
}

void Polytope::append(const Matrix& rows, const Vector& rhs, const std::vector<RowLabel>& row_labels) {
  const Index old = G.rows();
  const Index cols = old > 0 ? G.cols() : rows.cols();
  Matrix grown(old + rows.rows(), cols);
  grown.topRows(old) = G;
  grown.bottomRows(rows.rows()) = rows;
  Vector rhs_grown(old + rhs.size());
  rhs_grown << g, rhs;
  G = std::move(grown);
  g = std::move(rhs_grown);
  labels.insert(labels.end(), row_labels.begin(), row_labels.end());
}

Polytope project_fr(const RealLinearBundle& bundle, const UncertaintyModel& unc, const Vector& u) {
  const Matrix W = bundle.c_lu.solve(bundle.A);
  const Vector w = bundle.c_lu.solve(bundle.b - bundle.B * bundle.q);
  const Matrix E = evaluate_E(unc, u);

  const Index n = bundle.num_free();
  const Index m_v = bundle.F.rows();
  Polytope poly;
  poly.columns = bundle.free_customers;
  poly.G.resize(m_v + 2 * n, n);
  poly.g.resize(m_v + 2 * n);
  poly.G.topRows(m_v) = bundle.F * bundle.d_lu.solve(E * W);
  poly.g.head(m_v) = bundle.f - bundle.F * bundle.d_lu.solve(bundle.d - E * w);
  poly.labels = bundle.f_labels;
  for (Index j = 0; j < n; ++j) {
    poly.G.row(m_v + 2 * j).setZero();
    poly.G(m_v + 2 * j, j) = 1.0;
    poly.g(m_v + 2 * j) = bundle.p_max(j);
    poly.labels.push_back({RowKind::BoxUpper, bundle.free_customers[j]});
    poly.G.row(m_v + 2 * j + 1).setZero();
    poly.G(m_v + 2 * j + 1, j) = -1.0;
    poly.g(m_v + 2 * j + 1) = -bundle.p_min(j);
    poly.labels.push_back({RowKind::BoxLower, bundle.free_customers[j]});
  }
  return poly;
}

PointCheck contains_point(const Polytope& poly, const Vector& p) {
  if (p.size() != poly.dim()) throw std::invalid_argument("contains_point: dimension mismatch");
  PointCheck out;
  out.worst_slack = poly.rows() > 0 ? (poly.G * p - poly.g).maxCoeff() : -kInf;
  out.inside = out.worst_slack <= kMembershipTol;
  return out;
}

namespace {

LpSolution solve_checked(const LpProblem& lp, const char* what) {
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::IterationLimit) throw LpError(std::string(what) + ": LP iteration limit");
  return sol;
}

}  // namespace

std::optional<InteriorPoint> interior_point(const Polytope& poly) {
  const Index n = poly.dim();
  const Index m = poly.rows();
  constexpr double kRadiusCap = 1e6;
  LpProblem lp(n + 1);
  lp.sense = Sense::Maximize;
  lp.cost(n) = 1.0;
  lp.lower.setConstant(-kInf);
  lp.upper.head(n).setConstant(kInf);
  lp.upper(n) = kRadiusCap;
  lp.a_ub.resize(m, n + 1);
  lp.a_ub.leftCols(n) = poly.G;
  lp.a_ub.col(n) = poly.G.rowwise().norm();
  lp.b_ub = poly.g;
  const LpSolution sol = solve_checked(lp, "interior_point");
  if (!sol.optimal()) return std::nullopt;
  const double radius = sol.x(n);
  if (radius < -kMembershipTol) return std::nullopt;
  return InteriorPoint{sol.x.head(n), std::max(radius, 0.0)};
}

bool is_empty(const Polytope& poly) { return !interior_point(poly).has_value(); }

std::optional<SupportValue> support(const Matrix& G, const Vector& g, const Vector& direction, const Vector& anchor) {
  const Index n = G.cols();
  LpProblem lp(n);
  lp.sense = Sense::Maximize;
  lp.cost = direction;
  lp.lower.setConstant(-kInf);
  lp.a_ub = G;
  lp.b_ub = g - G * anchor;
  // Snap rounding noise at the anchor so the slack basis is feasible.
  for (Index i = 0; i < lp.b_ub.size(); ++i) {
    if (lp.b_ub(i) < 0.0 && lp.b_ub(i) > -1e-9 * (1.0 + std::abs(g(i)))) lp.b_ub(i) = 0.0;
  }
  const LpSolution sol = solve_checked(lp, "support");
  if (sol.status == LpStatus::Unbounded) return std::nullopt;
  if (!sol.optimal()) throw EmptyRegionError("support: region is empty at the given anchor");
  return SupportValue{direction.dot(anchor) + sol.objective, anchor + sol.x};
}

SubsetResult is_subset(const Polytope& inner, const Polytope& outer) {
  if (inner.dim() != outer.dim()) throw std::invalid_argument("is_subset: dimension mismatch");
  const auto anchor = interior_point(inner);
  if (!anchor) throw EmptyRegionError("is_subset: inner region is empty");
  SubsetResult out;
  out.margins.resize(outer.rows());
  out.subset = true;
  for (Index i = 0; i < outer.rows(); ++i) {
    const auto s = support(inner.G, inner.g, outer.G.row(i).transpose(), anchor->center);
    out.margins(i) = s ? s->value - outer.g(i) : kInf;
    if (out.margins(i) > kContainmentTol) out.subset = false;
  }
  return out;
}

Polytope remove_redundant(const Polytope& poly) {
  poly.check();
  if (is_empty(poly)) throw EmptyRegionError("remove_redundant: region is empty");
  const Index n = poly.dim();
  std::vector<Index> survivors(static_cast<std::size_t>(poly.rows()));
  for (Index i = 0; i < poly.rows(); ++i) survivors[static_cast<std::size_t>(i)] = i;

  for (Index i = 0; i < poly.rows(); ++i) {
    std::vector<Index> others;
    others.reserve(survivors.size());
    for (Index j : survivors) {
      if (j != i) others.push_back(j);
    }
    // Dual of max G_i p s.t. G_S p <= g_S:  min g_S^T y  s.t.  G_S^T y = G_i^T, y >= 0.
    const Index k = static_cast<Index>(others.size());
    LpProblem lp(k);
    lp.a_eq.resize(n, k);
    for (Index c = 0; c < k; ++c) {
      lp.a_eq.col(c) = poly.G.row(others[c]).transpose();
      lp.cost(c) = poly.g(others[c]);
    }
    lp.b_eq = poly.G.row(i).transpose();
    const LpSolution sol = solve_checked(lp, "remove_redundant");
    if (sol.optimal() && sol.objective <= poly.g(i) + kContainmentTol) {
      survivors.erase(std::find(survivors.begin(), survivors.end(), i));
    }
  }
  return poly.subset_rows(survivors);
}

std::vector<Eigen::Vector2d> vertices_2d(const Polytope& poly) {
  if (poly.dim() != 2) throw std::invalid_argument("vertices_2d: polytope is not two-dimensional");
  const auto anchor = interior_point(poly);
  if (!anchor) throw EmptyRegionError("vertices_2d: region is empty");
  for (int axis = 0; axis < 2; ++axis) {
    for (double sign : {1.0, -1.0}) {
      Vector dir = Vector::Zero(2);
      dir(axis) = sign;
      if (!support(poly.G, poly.g, dir, anchor->center)) throw std::domain_error("vertices_2d: region is unbounded");
    }
  }

  std::vector<Eigen::Vector2d> pts;
  for (Index i = 0; i < poly.rows(); ++i) {
    for (Index j = i + 1; j < poly.rows(); ++j) {
      Eigen::Matrix2d m;
      m << poly.G.row(i), poly.G.row(j);
      if (std::abs(m.determinant()) < 1e-12) continue;
      const Eigen::Vector2d x = m.partialPivLu().solve(Eigen::Vector2d(poly.g(i), poly.g(j)));
      if ((poly.G * x - poly.g).maxCoeff() > kVertexTol) continue;
      const bool seen = std::any_of(pts.begin(), pts.end(),
                                    [&](const Eigen::Vector2d& q) { return (q - x).norm() < kVertexDedupTol; });
      if (!seen) pts.push_back(x);
    }
  }
  if (pts.empty()) return pts;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return std::atan2(a.y() - centroid.y(), a.x() - centroid.x()) <
           std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
  });
  return pts;
}

Polytope hull_polytope(const std::vector<Eigen::Vector2d>& ccw) {
  if (ccw.size() < 3) throw std::invalid_argument("hull_polytope: need at least three vertices");
  Polytope out;
  const auto k = static_cast<Index>(ccw.size());
  out.G.resize(k, 2);
  out.g.resize(k);
  for (Index i = 0; i < k; ++i) {
    const Eigen::Vector2d& a = ccw[static_cast<std::size_t>(i)];
    const Eigen::Vector2d& b = ccw[static_cast<std::size_t>((i + 1) % k)];
    const Eigen::Vector2d normal(b.y() - a.y(), a.x() - b.x());
    out.G.row(i) = normal.transpose();
    out.g(i) = normal.dot(a);
    out.labels.push_back({RowKind::Hull, ""});
  }
  return out;
}

}  // namespace rfr
