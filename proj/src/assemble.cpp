#include "rfr/assemble.hpp"

#include <cmath>
#include <numbers>

namespace rfr {

const char* to_string(RowKind kind) {
  switch (kind) {
    case RowKind::VoltageUpper: return "v_upper";
    case RowKind::VoltageLower: return "v_lower";
    case RowKind::BoxUpper: return "p_upper";
    case RowKind::BoxLower: return "p_lower";
    case RowKind::Hull: return "hull";
  }
  return "unknown";
}

std::string RowLabel::to_string() const {
  std::string out = rfr::to_string(kind);
  if (!element.empty()) out += ":" + element;
  if (phase >= 0) out += std::string(":") + "abc"[phase];
  if (iteration > 0) out += "@" + std::to_string(iteration) + "#" + std::to_string(solution);
  return out;
}

namespace {

double phase_angle(Phase phase) {
  constexpr double third = 2.0 * std::numbers::pi / 3.0;
  switch (phase) {
    case Phase::A: return 0.0;
    case Phase::B: return -third;
    case Phase::C: return third;
  }
  return 0.0;
}

void add_block(Matrix& m, Index row, Index col, const Eigen::Matrix2d& block) { m.block<2, 2>(row, col) += block; }

// dE/d(real part) and dE/d(imaginary part) of one impedance entry.
const Eigen::Matrix2d& resistance_image() {
  static const Eigen::Matrix2d img = -real_block({1.0, 0.0});
  return img;
}
const Eigen::Matrix2d& reactance_image() {
  static const Eigen::Matrix2d img = -real_block({0.0, 1.0});
  return img;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void push_block(Triplets& out, Index row, Index col, const Eigen::Matrix2d& block, double scale) {
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      if (block(r, c) != 0.0 && scale != 0.0) out.emplace_back(row + r, col + c, scale * block(r, c));
    }
  }
}

// Contribution of a unit change of Z(i, j) (and Z(j, i)) on `line` to E.
void push_entry(Triplets& out, Index line, int i, int j, const Eigen::Matrix2d& image, double scale) {
  const auto pi = static_cast<Phase>(i);
  const auto pj = static_cast<Phase>(j);
  push_block(out, RealLinearBundle::drop_row(line, pi, Part::Re), RealLinearBundle::current_index(line, pj, Part::Re),
             image, scale);
  if (i != j) {
    push_block(out, RealLinearBundle::drop_row(line, pj, Part::Re),
               RealLinearBundle::current_index(line, pi, Part::Re), image, scale);
  }
}

Eigen::SparseMatrix<double> to_sparse(const Triplets& triplets, Index rows, Index cols) {
  Eigen::SparseMatrix<double> s(rows, cols);
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

}  // namespace

Eigen::Matrix2d injection_coefficients(Phase phase) {
  const double theta = phase_angle(phase);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d k;
  k << c, s, s, -c;
  return k;
}

Eigen::Matrix2d real_block(ComplexOhm z) {
  Eigen::Matrix2d m;
  m << z.real(), -z.imag(), z.imag(), z.real();
  return m;
}

RealLinearBundle assemble_bundle(const Network& net, std::span<const double> q) {
  if (const auto violations = validate_network(net); !violations.empty()) {
    throw AssemblyError("assemble: network is not well-posed (" + violations.front().to_string() + ")");
  }
  if (!q.empty() && q.size() != net.customers.size()) {
    throw std::invalid_argument("assemble: q has " + std::to_string(q.size()) + " entries for " +
                                std::to_string(net.customers.size()) + " customers");
  }

  RealLinearBundle bd;
  const Index n_bus = static_cast<Index>(net.buses.size());
  const Index n_line = static_cast<Index>(net.lines.size());
  bd.reference = static_cast<Index>(*net.bus_index(net.reference_bus));
  for (const Bus& bus : net.buses) bd.bus_ids.push_back(bus.id);
  for (const Line& line : net.lines) bd.line_ids.push_back(line.id);

  // KCL row offset per bus; -1 for the reference bus.
  std::vector<Index> kcl(n_bus, -1);
  for (Index i = 0, pos = 0; i < n_bus; ++i) {
    if (i != bd.reference) kcl[i] = 6 * pos++;
  }

  const Index n_kcl = 6 * (n_bus - 1);
  const Index n_cur = 6 * n_line;
  const Index n_volt = 6 * n_bus;

  bd.C = Matrix::Zero(n_kcl, n_cur);
  for (Index k = 0; k < n_line; ++k) {
    const Line& line = net.lines[k];
    const Index from = static_cast<Index>(*net.bus_index(line.from));
    const Index to = static_cast<Index>(*net.bus_index(line.to));
    for (Phase ph : kPhases) {
      for (Part part : {Part::Re, Part::Im}) {
        const Index col = RealLinearBundle::current_index(k, ph, part);
        const Index offset = 2 * static_cast<Index>(ph) + static_cast<Index>(part);
        if (kcl[to] >= 0) bd.C(kcl[to] + offset, col) += 1.0;
        if (kcl[from] >= 0) bd.C(kcl[from] + offset, col) -= 1.0;
      }
    }
  }

  const auto free = net.free_customers();
  const Index n_free = static_cast<Index>(free.size());
  const Index n_cust = static_cast<Index>(net.customers.size());
  bd.A = Matrix::Zero(n_kcl, n_free);
  bd.B = Matrix::Zero(n_kcl, n_cust);
  bd.b = Vector::Zero(n_kcl);
  bd.q = Vector::Zero(n_cust);
  bd.p_min.resize(n_free);
  bd.p_max.resize(n_free);
  Index free_col = 0;
  for (Index m = 0; m < n_cust; ++m) {
    const Customer& c = net.customers[m];
    bd.customers.push_back(c.id);
    bd.q(m) = q.empty() ? c.q_fixed : q[m];
    const Eigen::Matrix2d k = injection_coefficients(c.phase) / net.base_power;
    const Index row = kcl[*net.bus_index(c.bus)];
    const bool is_free = c.role() == CustomerRole::Free;
    if (is_free) {
      bd.free_customers.push_back(c.id);
      bd.p_min(free_col) = c.p_min;
      bd.p_max(free_col) = c.p_max;
    }
    if (row >= 0) {
      const Index r = row + 2 * static_cast<Index>(c.phase);
      bd.B.block<2, 1>(r, m) -= k.col(1);
      if (is_free) bd.A.block<2, 1>(r, free_col) -= k.col(0);
      else bd.b.segment<2>(r) += k.col(0) * (*c.p_fixed);
    }
    if (is_free) ++free_col;
  }

  bd.D = Matrix::Zero(n_volt, n_volt);
  bd.E = Matrix::Zero(n_volt, n_cur);
  bd.d = Vector::Zero(n_volt);
  for (Phase ph : kPhases) {
    const auto i = static_cast<std::size_t>(ph);
    for (Part part : {Part::Re, Part::Im}) {
      const Index row = 2 * static_cast<Index>(ph) + static_cast<Index>(part);
      bd.D(row, RealLinearBundle::voltage_index(bd.reference, ph, part)) = 1.0;
      bd.d(row) = part == Part::Re ? net.reference_voltage[i].real() : net.reference_voltage[i].imag();
    }
  }
  for (Index k = 0; k < n_line; ++k) {
    const Line& line = net.lines[k];
    const Index from = static_cast<Index>(*net.bus_index(line.from));
    const Index to = static_cast<Index>(*net.bus_index(line.to));
    const PhaseImpedanceMatrix z = line.impedance();
    for (Phase ph : kPhases) {
      for (Part part : {Part::Re, Part::Im}) {
        const Index row = RealLinearBundle::drop_row(k, ph, part);
        bd.D(row, RealLinearBundle::voltage_index(from, ph, part)) += 1.0;
        bd.D(row, RealLinearBundle::voltage_index(to, ph, part)) -= 1.0;
      }
      for (Phase ps : kPhases) {
        add_block(bd.E, RealLinearBundle::drop_row(k, ph, Part::Re), RealLinearBundle::current_index(k, ps, Part::Re),
                  -real_block(z(static_cast<int>(ph), static_cast<int>(ps))));
      }
    }
  }

  const Index n_f = 6 * (n_bus - 1);
  bd.F = Matrix::Zero(n_f, n_volt);
  bd.f = Vector::Zero(n_f);
  Index row = 0;
  for (Index i = 0; i < n_bus; ++i) {
    if (i == bd.reference) continue;
    for (Phase ph : kPhases) {
      const double theta = phase_angle(ph);
      const Index re = RealLinearBundle::voltage_index(i, ph, Part::Re);
      const Index im = RealLinearBundle::voltage_index(i, ph, Part::Im);
      const int phase = static_cast<int>(ph);
      bd.F(row, re) = std::cos(theta);
      bd.F(row, im) = std::sin(theta);
      bd.f(row) = net.buses[i].v_max;
      bd.f_labels.push_back({RowKind::VoltageUpper, net.buses[i].id, phase});
      ++row;
      bd.F(row, re) = -std::cos(theta);
      bd.F(row, im) = -std::sin(theta);
      bd.f(row) = -net.buses[i].v_min;
      bd.f_labels.push_back({RowKind::VoltageLower, net.buses[i].id, phase});
      ++row;
    }
  }

  try {
    bd.c_lu = LuFactor(bd.C);
    bd.d_lu = LuFactor(bd.D);
  } catch (const SingularMatrixError& e) {
    throw AssemblyError(std::string("assemble: network equations are singular (non-radial or disconnected): ") +
                        e.what());
  }
  return bd;
}

Vector UncertaintyModel::nominal() const {
  Vector v(size());
  for (Index k = 0; k < size(); ++k) v(k) = params[k].nominal;
  return v;
}

Vector UncertaintyModel::lower() const {
  Vector v(size());
  for (Index k = 0; k < size(); ++k) v(k) = params[k].lower;
  return v;
}

Vector UncertaintyModel::upper() const {
  Vector v(size());
  for (Index k = 0; k < size(); ++k) v(k) = params[k].upper;
  return v;
}

namespace {

constexpr std::array<std::pair<int, int>, 6> kUniqueEntries{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

UncertaintyModel parameter_layout(const Network& net, const RealLinearBundle& bundle, UncertaintyMode mode) {
  UncertaintyModel unc;
  unc.mode = mode;
  unc.e_nominal = bundle.E;
  const Index rows = bundle.E.rows();
  const Index cols = bundle.E.cols();

  if (mode == UncertaintyMode::PhaseEntries) {
    for (Index k = 0; k < static_cast<Index>(net.lines.size()); ++k) {
      const Line& line = net.lines[k];
      const PhaseImpedanceMatrix z = line.impedance();
      for (auto [i, j] : kUniqueEntries) {
        const std::string entry = std::string(1, "abc"[i]) + "abc"[j];
        for (bool reactance : {false, true}) {
          Triplets t;
          push_entry(t, k, i, j, reactance ? reactance_image() : resistance_image(), 1.0);
          const double value = reactance ? z(i, j).imag() : z(i, j).real();
          unc.params.push_back({"line " + line.id + (reactance ? " X " : " R ") + entry, value, value, value});
          unc.sensitivities.push_back(to_sparse(t, rows, cols));
        }
      }
    }
    return unc;
  }

  for (const Line& line : net.lines) {
    if (!line.code) throw ValidationError("sequence uncertainty: line " + line.id + " has no line code");
  }
  for (const LineCode& code : net.line_codes) {
    // d Z / d z+ and d Z / d z0 for one unit of length.
    const PhaseImpedanceMatrix d_plus = sequence_to_phase(1.0, 0.0);
    const PhaseImpedanceMatrix d_zero = sequence_to_phase(0.0, 1.0);
    struct Component {
      const char* name;
      bool zero;
      bool reactance;
      double value;
    };
    const std::array<Component, 4> components{{{"r+", false, false, code.z_plus.real()},
                                               {"x+", false, true, code.z_plus.imag()},
                                               {"r0", true, false, code.z_zero.real()},
                                               {"x0", true, true, code.z_zero.imag()}}};
    bool used = false;
    for (const Line& line : net.lines) used = used || line.code == code.name;
    if (!used) continue;
    for (const Component& comp : components) {
      Triplets t;
      for (Index k = 0; k < static_cast<Index>(net.lines.size()); ++k) {
        const Line& line = net.lines[k];
        if (line.code != code.name) continue;
        const PhaseImpedanceMatrix& dz = comp.zero ? d_zero : d_plus;
        for (auto [i, j] : kUniqueEntries) {
          push_entry(t, k, i, j, comp.reactance ? reactance_image() : resistance_image(),
                     line.length * dz(i, j).real());
        }
      }
      unc.params.push_back({"code " + code.name + " " + comp.name, comp.value, comp.value, comp.value});
      unc.sensitivities.push_back(to_sparse(t, rows, cols));
    }
  }
  return unc;
}

void warn_on_negative_resistance(UncertaintyModel& unc) {
  for (const UncertainParameter& p : unc.params) {
    const bool resistance = p.label.find(" R ") != std::string::npos || p.label.ends_with(" r+") ||
                            p.label.ends_with(" r0");
    if (resistance && p.lower < 0.0) {
      unc.warnings.push_back("parameter '" + p.label + "' admits negative resistance (lower bound " +
                             std::to_string(p.lower) + ")");
    }
  }
}

}  // namespace

UncertaintyModel build_uncertainty(const Network& net, const RealLinearBundle& bundle, UncertaintyMode mode,
                                   double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("uncertainty level delta must lie in [0, 1), got " + std::to_string(delta));
  }
  UncertaintyModel unc = parameter_layout(net, bundle, mode);
  for (UncertainParameter& p : unc.params) {
    const double a = (1.0 - delta) * p.nominal;
    const double b = (1.0 + delta) * p.nominal;
    p.lower = std::min(a, b);
    p.upper = std::max(a, b);
  }
  warn_on_negative_resistance(unc);
  return unc;
}

UncertaintyModel build_uncertainty(const Network& net, const RealLinearBundle& bundle, UncertaintyMode mode,
                                   std::span<const ParameterBounds> bounds) {
  UncertaintyModel unc = parameter_layout(net, bundle, mode);
  if (bounds.size() != unc.params.size()) {
    throw std::invalid_argument("uncertainty: " + std::to_string(bounds.size()) + " bounds given for " +
                                std::to_string(unc.params.size()) + " parameters");
  }
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    UncertainParameter& p = unc.params[k];
    if (!(bounds[k].lower <= p.nominal && p.nominal <= bounds[k].upper)) {
      throw std::invalid_argument("uncertainty: bounds for '" + p.label + "' do not bracket the nominal value");
    }
    p.lower = bounds[k].lower;
    p.upper = bounds[k].upper;
  }
  warn_on_negative_resistance(unc);
  return unc;
}

Matrix evaluate_E(const UncertaintyModel& unc, const Vector& u) {
  if (u.size() != unc.size()) {
    throw std::invalid_argument("evaluate_E: parameter vector has " + std::to_string(u.size()) + " entries, expected " +
                                std::to_string(unc.size()));
  }
  Matrix e = unc.e_nominal;
  for (Index k = 0; k < unc.size(); ++k) {
    const UncertainParameter& p = unc.params[k];
    const double slack = 1e-9 * (1.0 + std::abs(p.lower) + std::abs(p.upper));
    if (!(u(k) >= p.lower - slack && u(k) <= p.upper + slack)) {
      throw std::out_of_range("evaluate_E: parameter '" + p.label + "' = " + std::to_string(u(k)) +
                              " lies outside [" + std::to_string(p.lower) + ", " + std::to_string(p.upper) + "]");
    }
    const double step = u(k) - p.nominal;
    if (step != 0.0) e += step * unc.sensitivities[k];
  }
  return e;
}

}  // namespace rfr
