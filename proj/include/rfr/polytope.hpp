#pragma once

#include "rfr/assemble.hpp"
#include "rfr/numcore.hpp"
#include "rfr/row_label.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rfr {

class EmptyRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-space system { p | G p <= g } with per-row provenance.
struct Polytope {
  Matrix G;
  Vector g;
  std::vector<RowLabel> labels;
  std::vector<std::string> columns;  // free-customer ids

  Index rows() const { return G.rows(); }
  Index dim() const { return G.cols(); }

  /// Throws std::invalid_argument when shapes disagree or entries are not finite.
  void check() const;
  Polytope subset_rows(const std::vector<Index>& keep) const;
  void append(const Matrix& rows, const Vector& rhs, const std::vector<RowLabel>& row_labels);
};

/// Tolerances of the polyhedral operations.
inline constexpr double kMembershipTol = 1e-8;
inline constexpr double kContainmentTol = 1e-7;
inline constexpr double kVertexTol = 1e-7;
inline constexpr double kVertexDedupTol = 1e-6;

/// Feasible region at impedance parameters u: voltage rows H(u) p <= h(u)
/// followed by the customer box rows (labelled certain).
Polytope project_fr(const RealLinearBundle& bundle, const UncertaintyModel& unc, const Vector& u);

struct PointCheck {
  bool inside = false;
  double worst_slack = 0.0;  // max_i (G_i p - g_i)
};

PointCheck contains_point(const Polytope& poly, const Vector& p);

/// Center and radius of the largest inscribed ball (radius capped at 1e6),
/// or nullopt when the region is empty.
struct InteriorPoint {
  Vector center;
  double radius = 0.0;
};
std::optional<InteriorPoint> interior_point(const Polytope& poly);

bool is_empty(const Polytope& poly);

/// max direction^T p over the region, by the primal LP in p. `anchor` must be
/// a feasible point; nullopt means unbounded.
struct SupportValue {
  double value = 0.0;
  Vector argmax;
};
std::optional<SupportValue> support(const Matrix& G, const Vector& g, const Vector& direction, const Vector& anchor);

struct SubsetResult {
  bool subset = false;
  Vector margins;  // per outer row: max over inner of outer row minus rhs (kInf when unbounded)
};

/// Row-wise LP containment test. Throws EmptyRegionError when `inner` is empty.
SubsetResult is_subset(const Polytope& inner, const Polytope& outer);

/// Drops rows implied by the remaining ones, testing rows in order against the
/// current surviving set. Throws EmptyRegionError when the region is empty.
Polytope remove_redundant(const Polytope& poly);

/// Counterclockwise vertices of a bounded, nonempty 2-D region.
std::vector<Eigen::Vector2d> vertices_2d(const Polytope& poly);

/// Half-space form of a convex polygon given counterclockwise.
Polytope hull_polytope(const std::vector<Eigen::Vector2d>& ccw_vertices);

}  // namespace rfr
