#include "rfr/validation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <random>
#include <thread>

namespace rfr {

namespace {

ScenarioOutcome evaluate(const RealLinearBundle& bundle, const UncertaintyModel& unc, const Polytope& rfr,
                         const Polytope& initial, const Vector& u) {
  ScenarioOutcome out;
  const Polytope scenario = project_fr(bundle, unc, u);
  if (is_empty(scenario)) {
    out.empty = true;
    return out;
  }
  const SubsetResult a = is_subset(rfr, scenario);
  const SubsetResult b = is_subset(initial, scenario);
  out.rfr_contained = a.subset;
  out.initial_contained = b.subset;
  out.rfr_margin = a.margins.maxCoeff();
  out.initial_margin = b.margins.maxCoeff();
  return out;
}

}  // namespace

ValidationReport monte_carlo_validate(const RealLinearBundle& bundle, const UncertaintyModel& unc,
                                      const Polytope& rfr, const Polytope& initial, int n, std::uint64_t seed,
                                      int threads) {
  if (n < 1) throw std::invalid_argument("monte_carlo_validate: need at least one scenario");
  ValidationReport report;
  report.n_scenarios = n;
  report.seed = seed;

  // Samples are drawn serially so the scenario set depends only on the seed.
  std::mt19937_64 rng(seed);
  std::vector<Vector> samples;
  samples.reserve(static_cast<std::size_t>(n));
  const Vector lo = unc.lower();
  const Vector hi = unc.upper();
  for (int s = 0; s < n; ++s) {
    Vector u(unc.size());
    for (Index k = 0; k < unc.size(); ++k) {
      std::uniform_real_distribution<double> dist(lo(k), hi(k));
      u(k) = lo(k) == hi(k) ? lo(k) : dist(rng);
    }
    samples.push_back(std::move(u));
  }

  report.scenarios.resize(samples.size());
  std::vector<std::exception_ptr> errors(samples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < samples.size(); i = next++) {
      try {
        report.scenarios[i] = evaluate(bundle, unc, rfr, initial, samples[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  int rfr_hits = 0;
  int initial_hits = 0;
  for (const ScenarioOutcome& s : report.scenarios) {
    if (s.empty) {
      ++report.empty_scenarios;
      continue;
    }
    rfr_hits += s.rfr_contained;
    initial_hits += s.initial_contained;
  }
  const int counted = n - report.empty_scenarios;
  if (counted > 0) {
    report.contain_rfr = 100.0 * rfr_hits / counted;
    report.contain_initial = 100.0 * initial_hits / counted;
  }
  return report;
}

}  // namespace rfr
