#include "oracles.hpp"

#include "rfr/documents.hpp"

#include <gtest/gtest.h>

using namespace rfr;

TEST(Documents, PolytopeRoundTrip) {
  const Network net = load_network(oracle::data_path("twobus.json"));
  const RealLinearBundle bd = assemble_bundle(net);
  const UncertaintyModel unc = build_uncertainty(net, bd, UncertaintyMode::PhaseEntries, 0.0);
  const Polytope fr = project_fr(bd, unc, unc.nominal());
  const Polytope back = parse_polytope_document(polytope_document(fr));
  EXPECT_EQ(back.columns, fr.columns);
  EXPECT_EQ(back.labels, fr.labels);
  EXPECT_LT((back.G - fr.G).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((back.g - fr.g).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Documents, ResultDocumentCarriesRobustRegion) {
  const Network net = load_network(oracle::data_path("twobus.json"));
  const RealLinearBundle bd = assemble_bundle(net);
  const UncertaintyModel unc = build_uncertainty(net, bd, UncertaintyMode::PhaseEntries, 0.2);
  RobustConfig cfg;
  cfg.starts = 4;
  const RobustResult r = compute_rfr(bd, unc, cfg);
  const Polytope back = parse_polytope_document(result_document(r, unc));
  EXPECT_EQ(back.rows(), r.rfr.rows());
  EXPECT_EQ(back.labels, r.rfr.labels);
}

TEST(Documents, MalformedInputRejected) {
  EXPECT_THROW(parse_polytope_document("{"), std::invalid_argument);
  EXPECT_THROW(parse_polytope_document(R"({"columns": ["a"], "G": [[1, 2]], "g": [1], "labels": []})"),
               std::invalid_argument);
}

TEST(Documents, PolygonCsvClosesRing) {
  const std::vector<Eigen::Vector2d> v{{0, 0}, {1, 0}, {0, 1}};
  const std::string csv = polygon_csv(v, {"1", "3"});
  EXPECT_EQ(csv, "1,3\n0,0\n1,0\n0,1\n0,0\n");
}

TEST(Documents, IterationLogLine) {
  IterationRecord r;
  r.index = 2;
  r.max_objective = 0.5;
  r.unique_solutions = 3;
  r.rows_before = 10;
  r.rows_after = 7;
  r.elapsed_ms = 12.34;
  EXPECT_EQ(iteration_log_line(r), "2 5.000000e-01 3 10 7 12.3");
}
