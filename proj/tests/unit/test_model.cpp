#include "oracles.hpp"

#include "rfr/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace rfr;

namespace {

const char* kZ = R"([[[0.3,1.0],[0.1,0.5],[0.1,0.4]],[[0.1,0.5],[0.3,1.0],[0.1,0.4]],[[0.1,0.4],[0.1,0.4],[0.3,1.0]]])";

std::string path_network(int buses, const std::string& limits = R"({"v_min": 0.95, "v_max": 1.05})") {
  std::string doc = R"({"base": {"voltage": 230, "power": 1}, "limits": )" + limits + R"(, "buses": [)";
  for (int i = 0; i < buses; ++i) doc += (i ? "," : "") + std::string("\"n") + std::to_string(i) + "\"";
  doc += R"(], "reference": {"bus": "n0", "voltage": [[1,0],[-0.5,-0.8660254037844386],[-0.5,0.8660254037844386]]}, "lines": [)";
  for (int i = 1; i < buses; ++i) {
    doc += (i > 1 ? "," : "") + std::string(R"({"from": "n)") + std::to_string(i - 1) + R"(", "to": "n)" +
           std::to_string(i) + R"(", "z": )" + kZ + "}";
  }
  doc += R"(], "customers": [{"id": "c1", "bus": "n)" + std::to_string(buses - 1) +
         R"(", "phase": "a", "p_min": -5, "p_max": 5}]})";
  return doc;
}

bool has_violation(const std::vector<Violation>& v, const std::string& invariant) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.invariant == invariant; });
}

}  // namespace

TEST(Model, TwoBusFixtureParses) {
  const Network net = load_network(oracle::data_path("twobus.json"));
  EXPECT_TRUE(validate_network(net).empty());
  ASSERT_EQ(net.buses.size(), 2u);
  ASSERT_EQ(net.lines.size(), 1u);
  ASSERT_EQ(net.customers.size(), 3u);
  EXPECT_EQ(net.customers[0].phase, Phase::B);
  EXPECT_EQ(net.customers[1].role(), CustomerRole::Fixed);
  EXPECT_DOUBLE_EQ(*net.customers[1].p_fixed, -2.0);
  EXPECT_EQ(net.free_customers(), (std::vector<std::size_t>{0, 2}));
  const double zb = 230.0 * 230.0 / 1000.0;
  EXPECT_NEAR(net.impedance_base(), zb, 1e-12);
  EXPECT_NEAR(net.lines[0].impedance()(0, 0).real(), 0.3465 / zb, 1e-15);
  EXPECT_NEAR(net.lines[0].impedance()(1, 2).imag(), 0.3849 / zb, 1e-15);
}

TEST(Model, EqualVoltageLimitsRejected) {
  EXPECT_THROW(parse_network(path_network(2, R"({"v_min": 1.0, "v_max": 1.0})")), ValidationError);
}

TEST(Model, PathNetworkHasOneLineFewerThanBuses) {
  const Network net = parse_network(path_network(4));
  EXPECT_EQ(net.lines.size(), 3u);
  EXPECT_TRUE(validate_network(net).empty());
}

TEST(Model, MissingFieldNamesPath) {
  std::string doc = path_network(2);
  doc.replace(doc.find(R"("bus": "n1")"), 11, R"("bos": "n1")");
  try {
    parse_network(doc);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("customers[0].bus"), std::string::npos) << e.what();
  }
}

TEST(Model, AsymmetricImpedanceRejected) {
  std::string doc = path_network(2);
  doc.replace(doc.find("[0.1,0.5]"), 9, "[0.2,0.5]");
  EXPECT_THROW(parse_network(doc), ParseError);
}

TEST(Model, CycleIsRadialityViolation) {
  Network net = parse_network(path_network(3));
  Line extra = net.lines[0];
  extra.id = "loop";
  extra.from = "n0";
  extra.to = "n2";
  net.lines.push_back(extra);
  EXPECT_TRUE(has_violation(validate_network(net), "radial"));
}

TEST(Model, DanglingCustomerBusReported) {
  Network net = parse_network(path_network(2));
  net.customers[0].bus = "99";
  const auto v = validate_network(net);
  ASSERT_TRUE(has_violation(v, "dangling-reference"));
  EXPECT_TRUE(std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.element.find("99") != std::string::npos; }));
}

TEST(Model, NonPositiveLengthAndPowerLimits) {
  Network net = parse_network(path_network(2));
  net.lines[0].length = 0.0;
  net.customers[0].p_min = 3.0;
  net.customers[0].p_max = 1.0;
  const auto v = validate_network(net);
  EXPECT_TRUE(has_violation(v, "positive-length"));
  EXPECT_TRUE(has_violation(v, "power-limits"));
}

TEST(Model, SerializeRoundTrip) {
  for (const char* name : {"twobus.json", "feeder30.json"}) {
    const Network a = load_network(oracle::data_path(name));
    const Network b = parse_network(serialize_network(a));
    ASSERT_EQ(a.lines.size(), b.lines.size());
    ASSERT_EQ(a.customers.size(), b.customers.size());
    for (std::size_t k = 0; k < a.lines.size(); ++k) {
      EXPECT_LT((a.lines[k].impedance() - b.lines[k].impedance()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_EQ(a.lines[k].from, b.lines[k].from);
      EXPECT_EQ(a.lines[k].code, b.lines[k].code);
    }
    for (std::size_t m = 0; m < a.customers.size(); ++m) {
      EXPECT_EQ(a.customers[m].p_fixed, b.customers[m].p_fixed);
      EXPECT_DOUBLE_EQ(a.customers[m].p_min, b.customers[m].p_min);
      EXPECT_DOUBLE_EQ(a.customers[m].p_max, b.customers[m].p_max);
    }
    for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(std::abs(a.reference_voltage[k] - b.reference_voltage[k]), 1e-12);
  }
}

TEST(Model, PerUnitRoundTrip) {
  const Network net = load_network(oracle::data_path("twobus.json"));
  const double ohms = net.lines[0].impedance()(2, 2).real() * net.impedance_base();
  EXPECT_NEAR(ohms, 0.3414, 0.3414 * 1e-12);
}

TEST(Model, SequenceToPhase) {
  const auto z = sequence_to_phase({1.0, 2.0}, {4.0, 5.0});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const ComplexOhm expected = i == j ? ComplexOhm(2.0, 3.0) : ComplexOhm(1.0, 1.0);
      EXPECT_LT(std::abs(z(i, j) - expected), 1e-15);
    }
  }
}

TEST(Model, RadialityMatchesBreadthFirstOracle) {
  std::mt19937_64 rng(5);
  int radial_cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 8)(rng);
    const int m = std::uniform_int_distribution<int>(std::max(0, n - 2), n)(rng);
    std::uniform_int_distribution<int> pick(0, n - 1);
    Network net = parse_network(path_network(2));
    net.buses.clear();
    for (int i = 0; i < n; ++i) net.buses.push_back({"n" + std::to_string(i), 0.95, 1.05});
    net.reference_bus = "n0";
    net.customers[0].bus = "n0";
    const Line proto = net.lines[0];
    net.lines.clear();
    std::vector<std::pair<int, int>> edges;
    for (int k = 0; k < m; ++k) {
      int a = pick(rng);
      int b = pick(rng);
      // Bias toward tree edges so both outcomes are well represented.
      if (k < n - 1 && std::bernoulli_distribution(0.8)(rng)) {
        a = k + 1;
        b = std::uniform_int_distribution<int>(0, k)(rng);
      }
      edges.emplace_back(a, b);
      Line l = proto;
      l.id = "l" + std::to_string(k);
      l.from = "n" + std::to_string(a);
      l.to = "n" + std::to_string(b);
      net.lines.push_back(l);
    }
    const auto v = validate_network(net);
    const bool reported_ok = !has_violation(v, "radial") && !has_violation(v, "connected");
    const bool oracle = oracle::bfs_radial(n, edges);
    EXPECT_EQ(reported_ok, oracle) << "trial " << trial;
    radial_cases += oracle ? 1 : 0;
  }
  EXPECT_GT(radial_cases, 10);
  EXPECT_LT(radial_cases, 90);
}
