#include "rfr/model.hpp"

#include <cmath>
#include <numeric>
#include <set>

namespace rfr {

char phase_letter(Phase phase) { return "abc"[static_cast<int>(phase)]; }

std::optional<Phase> parse_phase(std::string_view text) {
  if (text == "a" || text == "A") return Phase::A;
  if (text == "b" || text == "B") return Phase::B;
  if (text == "c" || text == "C") return Phase::C;
  return std::nullopt;
}

std::optional<std::size_t> Network::bus_index(std::string_view id) const {
  for (std::size_t i = 0; i < buses.size(); ++i) {
    if (buses[i].id == id) return i;
  }
  return std::nullopt;
}

const LineCode* Network::find_code(std::string_view name) const {
  for (const LineCode& code : line_codes) {
    if (code.name == name) return &code;
  }
  return nullptr;
}

std::vector<std::size_t> Network::free_customers() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < customers.size(); ++i) {
    if (customers[i].role() == CustomerRole::Free) out.push_back(i);
  }
  return out;
}

PhaseImpedanceMatrix sequence_to_phase(ComplexOhm z_plus, ComplexOhm z_zero) {
  const ComplexOhm self = (2.0 * z_plus + z_zero) / 3.0;
  const ComplexOhm mutual = (z_zero - z_plus) / 3.0;
  PhaseImpedanceMatrix z;
  z.setConstant(mutual);
  z.diagonal().setConstant(self);
  return z;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool finite(ComplexOhm z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

std::vector<Violation> validate_network(const Network& net) {
  std::vector<Violation> out;
  auto report = [&](std::string invariant, std::string element) {
    out.push_back({std::move(invariant), std::move(element)});
  };

  if (!(net.base_voltage > 0.0) || !std::isfinite(net.base_voltage)) report("positive-base", "base_voltage");
  if (!(net.base_power > 0.0) || !std::isfinite(net.base_power)) report("positive-base", "base_power");
  if (net.buses.empty()) report("nonempty", "buses");

  std::set<std::string> ids;
  for (const Bus& bus : net.buses) {
    if (!ids.insert(bus.id).second) report("unique-id", "bus " + bus.id);
    if (!(bus.v_min > 0.0 && bus.v_min < bus.v_max) || !std::isfinite(bus.v_max)) {
      report("voltage-limits", "bus " + bus.id);
    }
  }

  if (!net.bus_index(net.reference_bus)) report("dangling-reference", "reference bus " + net.reference_bus);
  for (std::size_t k = 0; k < 3; ++k) {
    if (!finite(net.reference_voltage[k])) report("finite", std::string("reference voltage phase ") + "abc"[k]);
  }

  std::set<std::string> codes;
  for (const LineCode& code : net.line_codes) {
    if (!codes.insert(code.name).second) report("unique-id", "line code " + code.name);
    if (!finite(code.z_plus) || !finite(code.z_zero)) report("finite", "line code " + code.name);
  }

  DisjointSets components(net.buses.size());
  std::set<std::string> line_ids;
  bool endpoints_ok = true;
  for (const Line& line : net.lines) {
    const std::string name = "line " + line.id;
    if (!line_ids.insert(line.id).second) report("unique-id", name);
    const auto from = net.bus_index(line.from);
    const auto to = net.bus_index(line.to);
    if (!from) report("dangling-reference", name + " from bus " + line.from);
    if (!to) report("dangling-reference", name + " to bus " + line.to);
    if (!from || !to) {
      endpoints_ok = false;
      continue;
    }
    if (*from == *to) report("radial", name + " is a self-loop");
    else if (!components.unite(*from, *to)) report("radial", name + " closes a cycle");
    if (!(line.length > 0.0) || !std::isfinite(line.length)) report("positive-length", name);
    if (line.code && !net.find_code(*line.code)) report("dangling-reference", name + " line code " + *line.code);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (!finite(line.z(i, j))) report("finite", name);
        if (j > i && std::abs(line.z(i, j) - line.z(j, i)) > 1e-12 * (1.0 + std::abs(line.z(i, j)))) {
          report("impedance-symmetric", name);
        }
      }
    }
  }
  if (!net.buses.empty() && net.lines.size() + 1 != net.buses.size()) {
    report("radial", std::to_string(net.lines.size()) + " lines for " + std::to_string(net.buses.size()) + " buses");
  }
  if (endpoints_ok && !net.buses.empty()) {
    const std::size_t root = components.find(0);
    for (std::size_t i = 1; i < net.buses.size(); ++i) {
      if (components.find(i) != root) report("connected", "bus " + net.buses[i].id);
    }
  }

  std::set<std::string> customer_ids;
  for (const Customer& c : net.customers) {
    const std::string name = "customer " + c.id;
    if (!customer_ids.insert(c.id).second) report("unique-id", name);
    if (!net.bus_index(c.bus)) report("dangling-reference", name + " bus " + c.bus);
    if (!std::isfinite(c.p_min) || !std::isfinite(c.p_max) || !std::isfinite(c.q_fixed) ||
        (c.p_fixed && !std::isfinite(*c.p_fixed))) {
      report("finite", name);
    }
    if (!(c.p_min <= c.p_max)) report("power-limits", name);
  }
  return out;
}

}  // namespace rfr
