#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rfr {

using ComplexOhm = std::complex<double>;

/// 3x3 phase-frame series impedance. Entries are symmetric.
using PhaseImpedanceMatrix = Eigen::Matrix3cd;

enum class Phase { A = 0, B = 1, C = 2 };

inline constexpr std::array<Phase, 3> kPhases{Phase::A, Phase::B, Phase::C};

char phase_letter(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Bus {
  std::string id;
  double v_min = 0.95;  // p.u.
  double v_max = 1.05;  // p.u.
};

/// Sequence impedances of a conductor type, per unit of line length (p.u.).
struct LineCode {
  std::string name;
  ComplexOhm z_plus;
  ComplexOhm z_zero;
};

struct Line {
  std::string id;
  std::string from;
  std::string to;
  /// Per-unit impedance per unit length; multiply by `length` for the series impedance.
  PhaseImpedanceMatrix z = PhaseImpedanceMatrix::Zero();
  double length = 1.0;
  std::optional<std::string> code;

  PhaseImpedanceMatrix impedance() const { return length * z; }
};

enum class CustomerRole { Free, Fixed };

struct Customer {
  std::string id;
  std::string bus;
  Phase phase = Phase::A;
  std::optional<double> p_fixed;  // kW, positive = consumption
  double q_fixed = 0.0;           // kVar
  double p_min = 0.0;             // kW, negative = export
  double p_max = 0.0;             // kW

  CustomerRole role() const { return p_fixed ? CustomerRole::Fixed : CustomerRole::Free; }
};

struct Network {
  double base_voltage = 230.0;  // V, phase-to-neutral
  double base_power = 1.0;      // kVA per phase
  std::vector<Bus> buses;
  std::vector<LineCode> line_codes;
  std::vector<Line> lines;
  std::string reference_bus;
  std::array<ComplexOhm, 3> reference_voltage{};  // p.u.
  std::vector<Customer> customers;

  /// Ohms per p.u. impedance.
  double impedance_base() const { return base_voltage * base_voltage / (base_power * 1000.0); }

  std::optional<std::size_t> bus_index(std::string_view id) const;
  const LineCode* find_code(std::string_view name) const;
  std::vector<std::size_t> free_customers() const;
};

/// Diagonal (2z+ + z0)/3, off-diagonal (z0 - z+)/3.
PhaseImpedanceMatrix sequence_to_phase(ComplexOhm z_plus, ComplexOhm z_zero);

struct Violation {
  std::string invariant;
  std::string element;

  std::string to_string() const { return invariant + ": " + element; }
};

/// Returns every broken Network invariant; empty when the network is well-posed.
std::vector<Violation> validate_network(const Network& net);

/// Parses a network JSON document. Impedances are given in ohms and converted
/// to per-unit on the declared base. Throws ParseError on schema problems and
/// ValidationError when validate_network reports violations.
Network parse_network(std::string_view text);
Network load_network(const std::string& path);

/// Inverse of parse_network (impedances written back in ohms).
std::string serialize_network(const Network& net);

}  // namespace rfr
