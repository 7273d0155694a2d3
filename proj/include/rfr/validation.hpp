#pragma once

#include "rfr/assemble.hpp"
#include "rfr/polytope.hpp"

#include <cstdint>
#include <vector>

namespace rfr {

struct ScenarioOutcome {
  bool empty = false;              // the scenario's own feasible region is empty
  bool rfr_contained = false;
  bool initial_contained = false;
  double rfr_margin = 0.0;         // worst outer-row margin; <= 1e-7 means contained
  double initial_margin = 0.0;
};

struct ValidationReport {
  int n_scenarios = 0;
  std::uint64_t seed = 0;
  double contain_rfr = 0.0;        // percent of nonempty scenario regions containing the RFR
  double contain_initial = 0.0;    // same for the nominal region
  int empty_scenarios = 0;
  std::vector<ScenarioOutcome> scenarios;
};

/// Draws n impedance scenarios uniformly and independently per parameter and
/// checks whether each scenario's feasible region contains `rfr` and `initial`.
/// Empty scenario regions are counted separately and left out of the percentages.
ValidationReport monte_carlo_validate(const RealLinearBundle& bundle, const UncertaintyModel& unc,
                                      const Polytope& rfr, const Polytope& initial, int n, std::uint64_t seed,
                                      int threads = 1);

}  // namespace rfr
