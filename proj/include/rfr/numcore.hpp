#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace rfr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An LP ended in a status its caller cannot interpret.
class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tolerances shared by every LP and factorization in the library.
struct NumericConfig {
  double pivot_floor = 1e-12;      // LU pivots below this are singular
  double feasibility = 1e-9;       // simplex primal feasibility
  double optimality = 1e-9;        // reduced-cost threshold
  double ratio_pivot = 1e-11;      // smallest admissible ratio-test pivot
  int bland_after_degenerate = 500;
  int iteration_factor = 50;       // cap = factor * (columns + rows)
};

const NumericConfig& numeric_config();

/// LU factorization with partial pivoting, reusable across right-hand sides.
class LuFactor {
 public:
  LuFactor() = default;
  /// Throws SingularMatrixError if the matrix is not square or a pivot is too small.
  explicit LuFactor(const Matrix& m);

  Matrix solve(const Matrix& rhs) const;
  Index size() const { return size_; }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  Index size_ = 0;
};

/// Solves m * X = rhs.
Matrix lu_solve(const Matrix& m, const Matrix& rhs);

enum class Sense { Minimize, Maximize };

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status);

// Variables default to x >= 0. Set lower/upper entries to -kInf/kInf for free
// or one-sided variables.
struct LpProblem {
  LpProblem() = default;
  explicit LpProblem(Index n_vars);

  Index num_vars() const { return cost.size(); }

  Sense sense = Sense::Minimize;
  Vector cost;
  Matrix a_eq;
  Vector b_eq;
  Matrix a_ub;
  Vector b_ub;
  Vector lower;
  Vector upper;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
  /// Phase-1 objective (sum of artificials) at the end of phase 1.
  double infeasibility = 0.0;
  int iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

/// Two-phase primal simplex on a dense tableau. Rows of the <= system whose
/// right-hand side is nonnegative start with their slack basic, so problems
/// with a known feasible origin skip phase 1 entirely.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace rfr
