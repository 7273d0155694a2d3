#pragma once

#include "rfr/model.hpp"
#include "rfr/numcore.hpp"
#include "rfr/row_label.hpp"

#include <Eigen/Sparse>

#include <span>
#include <string>
#include <vector>

namespace rfr {

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Real part / imaginary part selector used by every index map.
enum class Part { Re = 0, Im = 1 };

/// Maps (P, Q) of a single-phase customer onto (I_re, I_im) of its demand
/// current, linearized around 1.0 p.u. at the nominal phase angle.
Eigen::Matrix2d injection_coefficients(Phase phase);

/// Real 2x2 image of a complex scalar z, such that [Re; Im](z*i) = block * [Re i; Im i].
Eigen::Matrix2d real_block(ComplexOhm z);

/// Compact linear model of the network:
///   A p + B q + C l = b     (current balance at non-reference buses)
///   D v + E l = d           (reference voltage and line voltage drops)
///   F v <= f                (voltage-magnitude limits at non-reference buses)
/// p are free-customer active powers in kW, q all customers' reactive powers in kVar.
struct RealLinearBundle {
  Matrix A, B, C;
  Vector b;
  Matrix D, E;
  Vector d;
  Matrix F;
  Vector f;
  Vector q;

  LuFactor c_lu;
  LuFactor d_lu;

  std::vector<std::string> bus_ids;
  std::vector<std::string> line_ids;
  std::vector<std::string> free_customers;  // columns of A
  std::vector<std::string> customers;       // columns of B
  std::vector<RowLabel> f_labels;           // one per row of F
  Vector p_min, p_max;                      // free-customer limits, kW
  Index reference = 0;                      // index of the reference bus

  Index num_free() const { return A.cols(); }
  Index num_buses() const { return static_cast<Index>(bus_ids.size()); }
  Index num_lines() const { return static_cast<Index>(line_ids.size()); }

  /// Column of l for line `line`, phase `phase`.
  static Index current_index(Index line, Phase phase, Part part) {
    return 6 * line + 2 * static_cast<Index>(phase) + static_cast<Index>(part);
  }
  /// Column of v for bus `bus`.
  static Index voltage_index(Index bus, Phase phase, Part part) {
    return 6 * bus + 2 * static_cast<Index>(phase) + static_cast<Index>(part);
  }
  /// Row of (D, E, d) holding the voltage drop of `line`. The first six rows pin the reference bus.
  static Index drop_row(Index line, Phase phase, Part part) { return 6 + current_index(line, phase, part); }
};

/// Builds the compact model. `q` holds one reactive power (kVar) per customer;
/// an empty span takes each customer's q_fixed.
RealLinearBundle assemble_bundle(const Network& net, std::span<const double> q = {});

enum class UncertaintyMode { PhaseEntries, Sequence };

struct UncertainParameter {
  std::string label;
  double nominal = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct ParameterBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Affine impedance family E(u) = E_nominal + sum_k (u_k - nominal_k) * S_k.
struct UncertaintyModel {
  UncertaintyMode mode = UncertaintyMode::PhaseEntries;
  std::vector<UncertainParameter> params;
  std::vector<Eigen::SparseMatrix<double>> sensitivities;
  Matrix e_nominal;
  std::vector<std::string> warnings;

  Index size() const { return static_cast<Index>(params.size()); }
  Vector nominal() const;
  Vector lower() const;
  Vector upper() const;
};

/// Parameter layout and nominal values for the mode. Phase-entry mode yields
/// 12 parameters per line (R and X of the six unique entries); sequence mode
/// yields r+, x+, r0, x0 per line code, shared by every line of that code.
UncertaintyModel build_uncertainty(const Network& net, const RealLinearBundle& bundle, UncertaintyMode mode,
                                   double delta);
UncertaintyModel build_uncertainty(const Network& net, const RealLinearBundle& bundle, UncertaintyMode mode,
                                   std::span<const ParameterBounds> bounds);

/// E at parameter vector u. Throws std::out_of_range when u leaves the box by more than 1e-9.
Matrix evaluate_E(const UncertaintyModel& unc, const Vector& u);

}  // namespace rfr
