#include "rfr/documents.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rfr {

using nlohmann::json;

namespace {

RowKind parse_kind(const std::string& s) {
  for (RowKind k : {RowKind::VoltageUpper, RowKind::VoltageLower, RowKind::BoxUpper, RowKind::BoxLower, RowKind::Hull}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("polytope document: unknown row kind '" + s + "'");
}

json label_json(const RowLabel& l) {
  return {{"kind", to_string(l.kind)}, {"element", l.element}, {"phase", l.phase},
          {"iteration", l.iteration}, {"solution", l.solution}};
}

json polytope_json(const Polytope& p) {
  json rows = json::array();
  for (Index i = 0; i < p.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < p.dim(); ++j) row.push_back(p.G(i, j));
    rows.push_back(std::move(row));
  }
  json labels = json::array();
  for (const RowLabel& l : p.labels) labels.push_back(label_json(l));
  return {{"columns", p.columns}, {"G", std::move(rows)}, {"g", std::vector<double>(p.g.data(), p.g.data() + p.g.size())},
          {"labels", std::move(labels)}};
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string polytope_document(const Polytope& poly) { return polytope_json(poly).dump(2) + "\n"; }

Polytope parse_polytope_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("polytope document: ") + e.what());
  }
  if (doc.contains("rfr")) doc = doc["rfr"];
  try {
    Polytope p;
    p.columns = doc.at("columns").get<std::vector<std::string>>();
    const auto rows = doc.at("G").get<std::vector<std::vector<double>>>();
    const auto rhs = doc.at("g").get<std::vector<double>>();
    const Index cols = static_cast<Index>(p.columns.size());
    p.G.resize(static_cast<Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Index>(rows[i].size()) != cols) throw std::invalid_argument("polytope document: ragged G");
      for (Index j = 0; j < cols; ++j) p.G(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
    p.g = Eigen::Map<const Vector>(rhs.data(), static_cast<Index>(rhs.size()));
    for (const json& l : doc.at("labels")) {
      p.labels.push_back({parse_kind(l.at("kind").get<std::string>()), l.at("element").get<std::string>(),
                          l.at("phase").get<int>(), l.at("iteration").get<int>(), l.at("solution").get<int>()});
    }
    p.check();
    return p;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("polytope document: ") + e.what());
  }
}

std::string result_document(const RobustResult& result, const UncertaintyModel& unc) {
  json params = json::array();
  for (const UncertainParameter& p : unc.params) {
    params.push_back({{"label", p.label}, {"nominal", p.nominal}, {"lower", p.lower}, {"upper", p.upper}});
  }
  json iterations = json::array();
  for (const IterationRecord& r : result.iterations) {
    iterations.push_back({{"index", r.index}, {"max_objective", r.max_objective},
                          {"unique_solutions", r.unique_solutions}, {"rows_before", r.rows_before},
                          {"rows_after", r.rows_after}});
  }
  json solutions = json::array();
  for (const CutSolution& s : result.solutions) {
    solutions.push_back(
        {{"iteration", s.iteration}, {"start", s.start_index}, {"objective", s.objective}, {"u", to_std(s.u)}});
  }
  const json doc = {{"converged", result.converged},
                    {"threshold", result.threshold},
                    {"mode", unc.mode == UncertaintyMode::Sequence ? "sequence" : "phase"},
                    {"parameters", std::move(params)},
                    {"iterations", std::move(iterations)},
                    {"solutions", std::move(solutions)},
                    {"initial", polytope_json(result.initial)},
                    {"rfr", polytope_json(result.rfr)}};
  return doc.dump(2) + "\n";
}

std::string report_document(const ValidationReport& report) {
  json scenarios = json::array();
  for (const ScenarioOutcome& s : report.scenarios) {
    json entry = {{"empty", s.empty}};
    if (!s.empty) {
      entry["rfr_contained"] = s.rfr_contained;
      entry["initial_contained"] = s.initial_contained;
      entry["rfr_margin"] = s.rfr_margin;
      entry["initial_margin"] = s.initial_margin;
    }
    scenarios.push_back(std::move(entry));
  }
  const json doc = {{"n_scenarios", report.n_scenarios},
                    {"seed", report.seed},
                    {"contain_rfr", report.contain_rfr},
                    {"contain_initial", report.contain_initial},
                    {"empty_scenarios", report.empty_scenarios},
                    {"scenarios", std::move(scenarios)}};
  return doc.dump(2) + "\n";
}

std::string iteration_log_line(const IterationRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d %.6e %d %lld %lld %.1f", r.index, r.max_objective, r.unique_solutions,
                static_cast<long long>(r.rows_before), static_cast<long long>(r.rows_after), r.elapsed_ms);
  return buf;
}

std::string polygon_csv(const std::vector<Eigen::Vector2d>& vertices, const std::vector<std::string>& columns) {
  std::ostringstream out;
  out.precision(17);
  out << (columns.size() == 2 ? columns[0] : "p1") << "," << (columns.size() == 2 ? columns[1] : "p2") << "\n";
  // Adding 0.0 turns -0 into 0.
  for (const auto& v : vertices) out << v.x() + 0.0 << "," << v.y() + 0.0 << "\n";
  if (!vertices.empty()) out << vertices.front().x() + 0.0 << "," << vertices.front().y() + 0.0 << "\n";
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

}  // namespace rfr
