// Command-line front end: nominal feasible region, robust feasible region,
// Monte Carlo validation and 2-D polygon export.

#include "rfr/assemble.hpp"
#include "rfr/documents.hpp"
#include "rfr/model.hpp"
#include "rfr/polytope.hpp"
#include "rfr/robust.hpp"
#include "rfr/validation.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string network;
  std::string result;
  std::string polytope;
  std::string out = ".";
  double delta = 0.2;
  std::string mode = "phase";
  double tol = 1e-6;
  int max_iter = 20;
  std::string starts = "all";
  std::uint64_t seed = 0;
  int threads = 1;
  int scenarios = 100;
  bool polygon = false;
};

rfr::UncertaintyMode parse_mode(const std::string& mode) {
  if (mode == "phase") return rfr::UncertaintyMode::PhaseEntries;
  if (mode == "sequence") return rfr::UncertaintyMode::Sequence;
  throw std::invalid_argument("--mode must be 'phase' or 'sequence'");
}

int parse_starts(const std::string& starts) {
  if (starts == "all") return 0;
  std::size_t used = 0;
  const int k = std::stoi(starts, &used);
  if (used != starts.size() || k < 1) throw std::invalid_argument("--starts must be 'all' or a positive count");
  return k;
}

std::string output_path(const Options& o, const std::string& name) {
  fs::create_directories(o.out);
  return (fs::path(o.out) / name).string();
}

rfr::UncertaintyModel uncertainty(const rfr::Network& net, const rfr::RealLinearBundle& bundle, const Options& o) {
  rfr::UncertaintyModel unc = rfr::build_uncertainty(net, bundle, parse_mode(o.mode), o.delta);
  for (const std::string& w : unc.warnings) std::cerr << "warning: " << w << "\n";
  return unc;
}

int run_fr(const Options& o) {
  const rfr::Network net = rfr::load_network(o.network);
  const rfr::RealLinearBundle bundle = rfr::assemble_bundle(net);
  const rfr::UncertaintyModel unc = rfr::build_uncertainty(net, bundle, rfr::UncertaintyMode::PhaseEntries, 0.0);
  const rfr::Polytope fr = rfr::remove_redundant(rfr::project_fr(bundle, unc, unc.nominal()));
  const std::string path = output_path(o, "fr.json");
  rfr::write_file(path, rfr::polytope_document(fr));
  std::cout << "nominal feasible region: " << fr.rows() << " rows over " << fr.dim() << " customers -> " << path
            << "\n";
  return 0;
}

int run_rfr(const Options& o) {
  const rfr::Network net = rfr::load_network(o.network);
  const rfr::RealLinearBundle bundle = rfr::assemble_bundle(net);
  const rfr::UncertaintyModel unc = uncertainty(net, bundle, o);
  rfr::RobustConfig config;
  config.objective_tol = o.tol;
  config.max_outer_iterations = o.max_iter;
  config.starts = parse_starts(o.starts);
  config.seed = o.seed;
  config.threads = o.threads;

  const rfr::RobustResult result = rfr::compute_rfr(bundle, unc, config);
  std::string log = "# iteration max_objective solutions rows_before rows_after elapsed_ms\n";
  for (const rfr::IterationRecord& r : result.iterations) log += rfr::iteration_log_line(r) + "\n";
  std::cout << log;
  const std::string doc = output_path(o, "rfr.json");
  rfr::write_file(doc, rfr::result_document(result, unc));
  rfr::write_file(output_path(o, "rfr.log"), log);
  std::cout << (result.converged ? "converged" : "NOT converged") << " after " << result.iterations.size()
            << " outer iterations; robust region has " << result.rfr.rows() << " rows -> " << doc << "\n";
  return result.converged ? 0 : 2;
}

int run_validate(const Options& o) {
  const rfr::Network net = rfr::load_network(o.network);
  const rfr::RealLinearBundle bundle = rfr::assemble_bundle(net);
  const rfr::UncertaintyModel unc = uncertainty(net, bundle, o);
  const std::string text = rfr::read_file(o.result);
  const rfr::Polytope robust = rfr::parse_polytope_document(text);
  const rfr::Polytope initial = rfr::remove_redundant(rfr::project_fr(bundle, unc, unc.nominal()));
  const rfr::ValidationReport report =
      rfr::monte_carlo_validate(bundle, unc, robust, initial, o.scenarios, o.seed, o.threads);
  const std::string path = output_path(o, "validation.json");
  rfr::write_file(path, rfr::report_document(report));
  std::cout << "scenarios " << report.n_scenarios << " (empty " << report.empty_scenarios << "), contain_rfr "
            << report.contain_rfr << "%, contain_initial " << report.contain_initial << "% -> " << path << "\n";
  return 0;
}

int run_export(const Options& o) {
  if (!o.polygon) throw std::invalid_argument("export: choose an output format (--polygon)");
  const rfr::Polytope poly = rfr::parse_polytope_document(rfr::read_file(o.polytope));
  const auto vertices = rfr::vertices_2d(poly);
  const std::string csv = rfr::polygon_csv(vertices, poly.columns);
  if (o.out == "-") {
    std::cout << csv;
  } else {
    const fs::path target = fs::path(o.out).has_extension() ? fs::path(o.out) : fs::path(o.out) / "polygon.csv";
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    rfr::write_file(target.string(), csv);
    std::cout << vertices.size() << " vertices -> " << target.string() << "\n";
  }
  return 0;
}

void add_uncertainty_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--delta", o.delta, "relative impedance uncertainty, in [0, 1)")->capture_default_str();
  cmd->add_option("--mode", o.mode, "uncertainty parameterization: phase | sequence")->capture_default_str();
  cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)")->capture_default_str();
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasible and robust feasible regions of DER active powers"};
  app.require_subcommand(1);
  Options o;

  CLI::App* fr = app.add_subcommand("fr", "export the nominal feasible region");
  fr->add_option("network", o.network, "network document")->required()->check(CLI::ExistingFile);
  fr->add_option("--out", o.out, "output directory")->capture_default_str();

  CLI::App* robust = app.add_subcommand("rfr", "compute the robust feasible region");
  robust->add_option("network", o.network, "network document")->required()->check(CLI::ExistingFile);
  add_uncertainty_flags(robust, o);
  robust->add_option("--tol", o.tol, "positive-objective threshold (relative)")->capture_default_str();
  robust->add_option("--max-iter", o.max_iter, "maximum outer iterations")->capture_default_str();
  robust->add_option("--starts", o.starts, "starting points: all | k")->capture_default_str();

  CLI::App* validate = app.add_subcommand("validate", "Monte Carlo robustness check of a robust region");
  validate->add_option("network", o.network, "network document")->required()->check(CLI::ExistingFile);
  validate->add_option("rfr", o.result, "result or polytope document")->required()->check(CLI::ExistingFile);
  add_uncertainty_flags(validate, o);
  validate->add_option("--n", o.scenarios, "number of scenarios")->capture_default_str();

  CLI::App* exporter = app.add_subcommand("export", "export plot data");
  exporter->add_flag("--polygon", o.polygon, "2-D vertex CSV");
  exporter->add_option("document", o.polytope, "polytope or result document")->required()->check(CLI::ExistingFile);
  exporter->add_option("--out", o.out, "output directory, .csv file, or - for stdout")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fr) return run_fr(o);
    if (*robust) return run_rfr(o);
    if (*validate) return run_validate(o);
    if (*exporter) return run_export(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
