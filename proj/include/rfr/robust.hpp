#pragma once

#include "rfr/assemble.hpp"
#include "rfr/polytope.hpp"

#include <cstdint>
#include <vector>

namespace rfr {

struct RobustConfig {
  double objective_tol = 1e-6;  // positive-objective threshold, scaled by the largest nominal |h|
  double itlp_tol = 1e-7;       // stop alternating once the objective gains less than this
  int max_alternations = 50;    // per starting point
  int max_outer_iterations = 20;
  double dedup_tol = 1e-8;      // worst-case parameter vectors closer than this (inf-norm) are merged
  std::uint64_t seed = 0;       // picks the subset of starting points when `starts` > 0
  int starts = 0;               // 0 = every starting point
  int threads = 1;

  void check() const;
};

/// Voltage rows of the feasible region as an affine function of the impedance
/// parameters: H(u) = H0 + sum_k (u_k - u0_k) dH_k, h(u) likewise. Customer box
/// rows do not move and are kept separately.
struct AffineRegion {
  Matrix H0;
  Vector h0;
  std::vector<Matrix> dH;
  std::vector<Vector> dh;
  Vector u_nominal, u_lower, u_upper;
  std::vector<RowLabel> labels;  // voltage rows
  Polytope box;                  // certain rows

  static AffineRegion build(const RealLinearBundle& bundle, const UncertaintyModel& unc);

  Index num_params() const { return u_nominal.size(); }
  Matrix H(const Vector& u) const;
  Vector h(const Vector& u) const;
  /// Voltage rows at u followed by the box rows.
  Polytope polytope(const Vector& u) const;
};

/// Minimum total right-hand-side relaxation that makes { G p <= g } a subset of
/// { H p <= h }, from the certificate system G^T x_i = H_i^T, x_i >= 0.
struct MttResult {
  double objective = 0.0;
  Vector row_gap;      // relaxation needed per row of H
  Matrix certificate;  // column i is x_i
};
MttResult mtt_feasibility(const Matrix& G, const Vector& g, const Matrix& H, const Vector& h);

/// Lagrange multipliers of the certificate system for fixed (H, h). Row i of
/// `alpha` is alpha_i.
struct Multipliers {
  Matrix alpha;
  Vector beta;
  Vector row_objective;
  double objective = 0.0;
};

/// Maximizes sum_i (-alpha_i^T H_i^T - beta_i h_i) subject to
/// G alpha_i + beta_i g >= 0 and 0 <= beta_i <= 1, one LP per row.
/// `anchor` must be a point of { G p <= g }.
Multipliers alpha_beta_step(const Matrix& G, const Vector& g, const Matrix& H, const Vector& h, const Vector& anchor);
Multipliers alpha_beta_step(const Matrix& G, const Vector& g, const Matrix& H, const Vector& h);

/// Gradient of the alternation objective with respect to u for fixed multipliers.
Vector z_step_coefficients(const Multipliers& mult, const AffineRegion& region);

/// Best parameter vector for fixed multipliers: each coordinate at the bound
/// its coefficient points to, nominal when the coefficient vanishes.
Vector z_step(const Multipliers& mult, const AffineRegion& region);

/// Nominal vector with one coordinate moved to its lower or upper bound, for every coordinate.
std::vector<Vector> starting_points(const UncertaintyModel& unc);
std::vector<Vector> starting_points(const AffineRegion& region);

struct WorstCaseSolution {
  Vector u;
  double objective = 0.0;
  Matrix alpha;
  Vector beta;
  Vector row_violation;
  int start_index = -1;
  int alternations = 0;
  bool converged = false;
  std::vector<double> trace;  // objective after every multiplier step
};

/// Alternates multiplier and parameter steps from `u_start` and returns the best pair found.
WorstCaseSolution bilp_max(const Polytope& region, const AffineRegion& family, const Vector& u_start,
                           const RobustConfig& config, int start_index = -1);

struct IterationRecord {
  int index = 0;
  double max_objective = 0.0;
  int unique_solutions = 0;
  Index rows_before = 0;
  Index rows_after = 0;
  double elapsed_ms = 0.0;
};

struct CutSolution {
  int iteration = 0;
  int start_index = -1;
  double objective = 0.0;
  Vector u;
};

struct RobustResult {
  Polytope rfr;
  Polytope initial;  // nominal region after pruning
  std::vector<IterationRecord> iterations;
  std::vector<CutSolution> solutions;
  double threshold = 0.0;
  bool converged = false;
};

RobustResult compute_rfr(const RealLinearBundle& bundle, const UncertaintyModel& unc, const RobustConfig& config);

}  // namespace rfr
