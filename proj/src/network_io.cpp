#include "rfr/model.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace rfr {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError("network document: field '" + path + "' " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "must be an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "is missing");
  return *it;
}

double number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "must be a number");
  return value.get<double>();
}

std::string text(const json& value, const std::string& path) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  fail(path, "must be a string");
}

ComplexOhm complex(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 2) fail(path, "must be a [re, im] pair");
  return {number(value[0], path + "[0]"), number(value[1], path + "[1]")};
}

double optional_number(const json& obj, const char* key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  return number(*it, path + "." + key);
}

json encode(ComplexOhm z) { return json::array({z.real(), z.imag()}); }

PhaseImpedanceMatrix impedance_matrix(const json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 3) fail(path, "must be a 3x3 array of [re, im] pairs");
  PhaseImpedanceMatrix z;
  for (int i = 0; i < 3; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!value[i].is_array() || value[i].size() != 3) fail(row_path, "must hold 3 entries");
    for (int j = 0; j < 3; ++j) z(i, j) = complex(value[i][j], row_path + "[" + std::to_string(j) + "]");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(z(i, j) - z(j, i)) > 1e-12 * (1.0 + std::abs(z(i, j)))) {
        fail(path, "is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  return z;
}

}  // namespace

Network parse_network(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("network document: ") + e.what());
  }
  if (!doc.is_object()) fail("<root>", "must be an object");

  Network net;
  const json& base = require(doc, "base", "");
  net.base_voltage = number(require(base, "voltage", "base"), "base.voltage");
  net.base_power = number(require(base, "power", "base"), "base.power");
  if (!(net.base_voltage > 0.0) || !(net.base_power > 0.0)) fail("base", "must be positive");
  const double z_base = net.impedance_base();

  const json& limits = require(doc, "limits", "");
  const double v_min = number(require(limits, "v_min", "limits"), "limits.v_min");
  const double v_max = number(require(limits, "v_max", "limits"), "limits.v_max");

  const json& buses = require(doc, "buses", "");
  if (!buses.is_array()) fail("buses", "must be an array");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const std::string path = "buses[" + std::to_string(i) + "]";
    Bus bus{"", v_min, v_max};
    if (buses[i].is_object()) {
      bus.id = text(require(buses[i], "id", path), path + ".id");
      bus.v_min = optional_number(buses[i], "v_min", v_min, path);
      bus.v_max = optional_number(buses[i], "v_max", v_max, path);
    } else {
      bus.id = text(buses[i], path);
    }
    net.buses.push_back(std::move(bus));
  }

  const json& reference = require(doc, "reference", "");
  net.reference_bus = text(require(reference, "bus", "reference"), "reference.bus");
  const json& v0 = require(reference, "voltage", "reference");
  if (!v0.is_array() || v0.size() != 3) fail("reference.voltage", "must hold three [re, im] pairs");
  for (std::size_t k = 0; k < 3; ++k) net.reference_voltage[k] = complex(v0[k], "reference.voltage[" + std::to_string(k) + "]");

  if (auto it = doc.find("line_codes"); it != doc.end()) {
    if (!it->is_array()) fail("line_codes", "must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "line_codes[" + std::to_string(i) + "]";
      const json& entry = (*it)[i];
      LineCode code;
      code.name = text(require(entry, "name", path), path + ".name");
      code.z_plus = complex(require(entry, "z_plus", path), path + ".z_plus") / z_base;
      code.z_zero = complex(require(entry, "z_zero", path), path + ".z_zero") / z_base;
      net.line_codes.push_back(std::move(code));
    }
  }

  const json& lines = require(doc, "lines", "");
  if (!lines.is_array()) fail("lines", "must be an array");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string path = "lines[" + std::to_string(i) + "]";
    const json& entry = lines[i];
    Line line;
    line.id = entry.contains("id") ? text(entry["id"], path + ".id") : std::to_string(i);
    line.from = text(require(entry, "from", path), path + ".from");
    line.to = text(require(entry, "to", path), path + ".to");
    line.length = optional_number(entry, "length", 1.0, path);
    const bool has_z = entry.contains("z");
    const bool has_code = entry.contains("code");
    if (has_z == has_code) fail(path, "must give exactly one of 'z' or 'code'");
    if (has_z) {
      line.z = impedance_matrix(entry["z"], path + ".z") / z_base;
    } else {
      line.code = text(entry["code"], path + ".code");
      const LineCode* code = net.find_code(*line.code);
      if (!code) throw ValidationError("network document: " + path + " references unknown line code " + *line.code);
      line.z = sequence_to_phase(code->z_plus, code->z_zero);
    }
    net.lines.push_back(std::move(line));
  }

  const json& customers = require(doc, "customers", "");
  if (!customers.is_array()) fail("customers", "must be an array");
  for (std::size_t i = 0; i < customers.size(); ++i) {
    const std::string path = "customers[" + std::to_string(i) + "]";
    const json& entry = customers[i];
    Customer c;
    c.id = text(require(entry, "id", path), path + ".id");
    c.bus = text(require(entry, "bus", path), path + ".bus");
    const std::string phase = text(require(entry, "phase", path), path + ".phase");
    auto parsed = parse_phase(phase);
    if (!parsed) fail(path + ".phase", "must be one of a, b, c");
    c.phase = *parsed;
    c.q_fixed = optional_number(entry, "q", 0.0, path);
    if (auto it = entry.find("p_fixed"); it != entry.end() && !it->is_null()) {
      c.p_fixed = number(*it, path + ".p_fixed");
    }
    c.p_min = optional_number(entry, "p_min", c.p_fixed.value_or(0.0), path);
    c.p_max = optional_number(entry, "p_max", c.p_fixed.value_or(0.0), path);
    if (!c.p_fixed && (!entry.contains("p_min") || !entry.contains("p_max"))) {
      fail(path, "free customers need p_min and p_max");
    }
    net.customers.push_back(std::move(c));
  }

  const auto violations = validate_network(net);
  if (!violations.empty()) {
    std::string msg = "network document failed validation:";
    for (const Violation& v : violations) msg += "\n  " + v.to_string();
    throw ValidationError(msg);
  }
  return net;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network document " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

std::string serialize_network(const Network& net) {
  const double z_base = net.impedance_base();
  json doc;
  doc["base"] = {{"voltage", net.base_voltage}, {"power", net.base_power}};
  const double v_min = net.buses.empty() ? 0.95 : net.buses.front().v_min;
  const double v_max = net.buses.empty() ? 1.05 : net.buses.front().v_max;
  doc["limits"] = {{"v_min", v_min}, {"v_max", v_max}};
  json buses = json::array();
  for (const Bus& bus : net.buses) buses.push_back({{"id", bus.id}, {"v_min", bus.v_min}, {"v_max", bus.v_max}});
  doc["buses"] = std::move(buses);
  json v0 = json::array();
  for (const ComplexOhm& v : net.reference_voltage) v0.push_back(encode(v));
  doc["reference"] = {{"bus", net.reference_bus}, {"voltage", std::move(v0)}};
  if (!net.line_codes.empty()) {
    json codes = json::array();
    for (const LineCode& code : net.line_codes) {
      codes.push_back({{"name", code.name}, {"z_plus", encode(code.z_plus * z_base)}, {"z_zero", encode(code.z_zero * z_base)}});
    }
    doc["line_codes"] = std::move(codes);
  }
  json lines = json::array();
  for (const Line& line : net.lines) {
    json entry = {{"id", line.id}, {"from", line.from}, {"to", line.to}, {"length", line.length}};
    if (line.code) {
      entry["code"] = *line.code;
    } else {
      json z = json::array();
      for (int i = 0; i < 3; ++i) {
        json row = json::array();
        for (int j = 0; j < 3; ++j) row.push_back(encode(line.z(i, j) * z_base));
        z.push_back(std::move(row));
      }
      entry["z"] = std::move(z);
    }
    lines.push_back(std::move(entry));
  }
  doc["lines"] = std::move(lines);
  json customers = json::array();
  for (const Customer& c : net.customers) {
    json entry = {{"id", c.id}, {"bus", c.bus}, {"phase", std::string(1, phase_letter(c.phase))},
                  {"q", c.q_fixed}, {"p_min", c.p_min}, {"p_max", c.p_max}};
    if (c.p_fixed) entry["p_fixed"] = *c.p_fixed;
    customers.push_back(std::move(entry));
  }
  doc["customers"] = std::move(customers);
  return doc.dump(2) + "\n";
}

}  // namespace rfr
