#include "rfr/numcore.hpp"

#include <cmath>

namespace rfr {

const NumericConfig& numeric_config() {
  static const NumericConfig config;
  return config;
}

LuFactor::LuFactor(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw SingularMatrixError("lu: matrix is " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + ", expected square");
  }
  size_ = m.rows();
  if (size_ == 0) return;
  lu_.compute(m);
  const auto pivots = lu_.matrixLU().diagonal().cwiseAbs();
  Index worst = 0;
  const double smallest = pivots.minCoeff(&worst);
  if (!(smallest >= numeric_config().pivot_floor)) {
    throw SingularMatrixError("lu: pivot " + std::to_string(worst) + " has magnitude " +
                              std::to_string(smallest));
  }
}

Matrix LuFactor::solve(const Matrix& rhs) const {
  if (rhs.rows() != size_) {
    throw std::invalid_argument("lu: rhs has " + std::to_string(rhs.rows()) + " rows, expected " +
                                std::to_string(size_));
  }
  if (size_ == 0) return rhs;
  return lu_.solve(rhs);
}

Matrix lu_solve(const Matrix& m, const Matrix& rhs) { return LuFactor(m).solve(rhs); }

}  // namespace rfr
