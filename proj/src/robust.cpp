#include "rfr/robust.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <random>
#include <thread>

namespace rfr {

void RobustConfig::check() const {
  if (!(objective_tol > 0.0) || !(itlp_tol > 0.0) || !(dedup_tol > 0.0)) {
    throw std::invalid_argument("robust config: tolerances must be positive");
  }
  if (max_alternations < 1 || max_outer_iterations < 1) {
    throw std::invalid_argument("robust config: iteration caps must be at least 1");
  }
  if (starts < 0 || threads < 0) throw std::invalid_argument("robust config: negative start or thread count");
}

AffineRegion AffineRegion::build(const RealLinearBundle& bundle, const UncertaintyModel& unc) {
  AffineRegion r;
  const Matrix W = bundle.c_lu.solve(bundle.A);
  const Vector w = bundle.c_lu.solve(bundle.b - bundle.B * bundle.q);
  const Matrix& E = unc.e_nominal;
  r.H0 = bundle.F * bundle.d_lu.solve(E * W);
  r.h0 = bundle.f - bundle.F * bundle.d_lu.solve(bundle.d - E * w);
  const Index n = bundle.num_free();
  for (const auto& s : unc.sensitivities) {
    Matrix rhs(s.rows(), n + 1);
    rhs.leftCols(n) = s * W;
    rhs.col(n) = s * w;
    const Matrix image = bundle.F * bundle.d_lu.solve(rhs);
    r.dH.push_back(image.leftCols(n));
    r.dh.push_back(image.col(n));
  }
  r.u_nominal = unc.nominal();
  r.u_lower = unc.lower();
  r.u_upper = unc.upper();
  r.labels = bundle.f_labels;

  const Polytope full = project_fr(bundle, unc, r.u_nominal);
  std::vector<Index> box_rows;
  for (Index i = bundle.F.rows(); i < full.rows(); ++i) box_rows.push_back(i);
  r.box = full.subset_rows(box_rows);
  return r;
}

Matrix AffineRegion::H(const Vector& u) const {
  Matrix out = H0;
  for (Index k = 0; k < num_params(); ++k) {
    const double step = u(k) - u_nominal(k);
    if (step != 0.0) out += step * dH[static_cast<std::size_t>(k)];
  }
  return out;
}

Vector AffineRegion::h(const Vector& u) const {
  Vector out = h0;
  for (Index k = 0; k < num_params(); ++k) {
    const double step = u(k) - u_nominal(k);
    if (step != 0.0) out += step * dh[static_cast<std::size_t>(k)];
  }
  return out;
}

Polytope AffineRegion::polytope(const Vector& u) const {
  Polytope p;
  p.columns = box.columns;
  p.G = H(u);
  p.g = h(u);
  p.labels = labels;
  p.append(box.G, box.g, box.labels);
  return p;
}

MttResult mtt_feasibility(const Matrix& G, const Vector& g, const Matrix& H, const Vector& h) {
  if (G.cols() != H.cols() || G.rows() != g.size() || H.rows() != h.size()) {
    throw std::invalid_argument("mtt_feasibility: inconsistent shapes");
  }
  const Index m = G.rows();
  const Index n = G.cols();
  MttResult out;
  out.row_gap.resize(H.rows());
  out.certificate.resize(m, H.rows());
  for (Index i = 0; i < H.rows(); ++i) {
    // variables: x (m), gap (1)
    LpProblem lp(m + 1);
    lp.cost(m) = 1.0;
    lp.a_eq = Matrix::Zero(n, m + 1);
    lp.a_eq.leftCols(m) = G.transpose();
    lp.b_eq = H.row(i).transpose();
    lp.a_ub.resize(1, m + 1);
    lp.a_ub.row(0).head(m) = g.transpose();
    lp.a_ub(0, m) = -1.0;
    lp.b_ub = Vector::Constant(1, h(i));
    const LpSolution sol = solve_lp(lp);
    if (!sol.optimal()) {
      throw LpError("mtt_feasibility: certificate LP for row " + std::to_string(i) + " is " + to_string(sol.status));
    }
    out.row_gap(i) = sol.x(m);
    out.certificate.col(i) = sol.x.head(m);
  }
  out.objective = out.row_gap.sum();
  return out;
}

Multipliers alpha_beta_step(const Matrix& G, const Vector& g, const Matrix& H, const Vector& h, const Vector& anchor) {
  if (G.cols() != H.cols() || G.rows() != g.size() || H.rows() != h.size() || anchor.size() != G.cols()) {
    throw std::invalid_argument("alpha_beta_step: inconsistent shapes");
  }
  // The constraint set is a cone cut by beta <= 1, and {G p <= g} is bounded,
  // so beta = 0 forces alpha = 0 and the optimum sits at beta in {0, 1}. With
  // beta = 1 the row problem is max -H_i alpha s.t. -G alpha <= g.
  Multipliers out;
  out.alpha = Matrix::Zero(H.rows(), G.cols());
  out.beta = Vector::Zero(H.rows());
  out.row_objective = Vector::Zero(H.rows());
  const Matrix neg_g = -G;
  const Vector alpha_anchor = -anchor;
  for (Index i = 0; i < H.rows(); ++i) {
    const auto s = support(neg_g, g, -H.row(i).transpose(), alpha_anchor);
    if (!s) {
      throw LpError("alpha_beta_step: multiplier LP for row " + std::to_string(i) +
                    " is unbounded (inner region unbounded or empty)");
    }
    const double value = s->value - h(i);
    if (value > 0.0) {
      out.alpha.row(i) = s->argmax.transpose();
      out.beta(i) = 1.0;
      out.row_objective(i) = value;
    }
  }
  out.objective = out.row_objective.sum();
  return out;
}

Multipliers alpha_beta_step(const Matrix& G, const Vector& g, const Matrix& H, const Vector& h) {
  Polytope inner;
  inner.G = G;
  inner.g = g;
  inner.labels.resize(static_cast<std::size_t>(G.rows()));
  const auto anchor = interior_point(inner);
  if (!anchor) throw EmptyRegionError("alpha_beta_step: inner region is empty");
  return alpha_beta_step(G, g, H, h, anchor->center);
}

Vector z_step_coefficients(const Multipliers& mult, const AffineRegion& region) {
  Vector c(region.num_params());
  for (Index k = 0; k < region.num_params(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    c(k) = -mult.alpha.cwiseProduct(region.dH[idx]).sum() - mult.beta.dot(region.dh[idx]);
  }
  return c;
}

Vector z_step(const Multipliers& mult, const AffineRegion& region) {
  constexpr double kFlat = 1e-12;
  const Vector c = z_step_coefficients(mult, region);
  Vector u = region.u_nominal;
  for (Index k = 0; k < c.size(); ++k) {
    if (c(k) > kFlat) u(k) = region.u_upper(k);
    else if (c(k) < -kFlat) u(k) = region.u_lower(k);
  }
  return u;
}

namespace {

std::vector<Vector> axis_projections(const Vector& nominal, const Vector& lower, const Vector& upper) {
  std::vector<Vector> out;
  for (Index k = 0; k < nominal.size(); ++k) {
    Vector lo = nominal;
    lo(k) = lower(k);
    Vector hi = nominal;
    hi(k) = upper(k);
    out.push_back(std::move(lo));
    out.push_back(std::move(hi));
  }
  return out;
}

}  // namespace

std::vector<Vector> starting_points(const UncertaintyModel& unc) {
  return axis_projections(unc.nominal(), unc.lower(), unc.upper());
}

std::vector<Vector> starting_points(const AffineRegion& region) {
  return axis_projections(region.u_nominal, region.u_lower, region.u_upper);
}

WorstCaseSolution bilp_max(const Polytope& region, const AffineRegion& family, const Vector& u_start,
                           const RobustConfig& config, int start_index) {
  if (u_start.size() != family.num_params()) throw std::invalid_argument("bilp_max: starting point has wrong size");
  for (Index k = 0; k < u_start.size(); ++k) {
    const double slack = 1e-9 * (1.0 + std::abs(family.u_lower(k)) + std::abs(family.u_upper(k)));
    if (u_start(k) < family.u_lower(k) - slack || u_start(k) > family.u_upper(k) + slack) {
      throw std::out_of_range("bilp_max: starting point outside the uncertainty box");
    }
  }
  const auto anchor = interior_point(region);
  if (!anchor) throw EmptyRegionError("bilp_max: region is empty");

  WorstCaseSolution best;
  best.start_index = start_index;
  best.objective = -kInf;
  Vector u = u_start;
  double previous = -kInf;
  for (int t = 0; t < config.max_alternations; ++t) {
    Multipliers mult = alpha_beta_step(region.G, region.g, family.H(u), family.h(u), anchor->center);
    best.trace.push_back(mult.objective);
    best.alternations = t + 1;
    if (mult.objective > best.objective) {
      best.u = u;
      best.objective = mult.objective;
      best.alpha = mult.alpha;
      best.beta = mult.beta;
      best.row_violation = mult.row_objective;
    }
    if (t > 0 && mult.objective - previous < config.itlp_tol) {
      best.converged = true;
      break;
    }
    previous = mult.objective;
    Vector next = z_step(mult, family);
    if (next == u) {
      best.converged = true;
      break;
    }
    u = std::move(next);
  }
  return best;
}

namespace {

std::vector<WorstCaseSolution> run_starts(const Polytope& region, const AffineRegion& family,
                                          const std::vector<Vector>& starts, const std::vector<int>& start_ids,
                                          const RobustConfig& config) {
  std::vector<WorstCaseSolution> out(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      try {
        out[i] = bilp_max(region, family, starts[i], config, start_ids[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(starts.size(), 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

RobustResult compute_rfr(const RealLinearBundle& bundle, const UncertaintyModel& unc, const RobustConfig& config) {
  config.check();
  const AffineRegion family = AffineRegion::build(bundle, unc);

  RobustResult result;
  Polytope nominal = family.polytope(family.u_nominal);
  try {
    result.initial = remove_redundant(nominal);
  } catch (const EmptyRegionError&) {
    throw EmptyRegionError("compute_rfr: the nominal feasible region is empty");
  }
  const double scale = family.h0.size() > 0 ? family.h0.cwiseAbs().maxCoeff() : 0.0;
  result.threshold = config.objective_tol * (scale > 0.0 ? scale : 1.0);

  std::vector<Vector> starts = starting_points(family);
  std::vector<int> start_ids(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) start_ids[i] = static_cast<int>(i);
  if (config.starts > 0 && static_cast<std::size_t>(config.starts) < starts.size()) {
    std::mt19937_64 rng(config.seed);
    std::shuffle(start_ids.begin(), start_ids.end(), rng);
    start_ids.resize(static_cast<std::size_t>(config.starts));
    std::sort(start_ids.begin(), start_ids.end());
    std::vector<Vector> chosen;
    for (int id : start_ids) chosen.push_back(starts[static_cast<std::size_t>(id)]);
    starts = std::move(chosen);
  }

  Polytope region = result.initial;
  for (int it = 1; it <= config.max_outer_iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<WorstCaseSolution> found = run_starts(region, family, starts, start_ids, config);

    IterationRecord record;
    record.index = it;
    record.max_objective = 0.0;
    std::vector<const WorstCaseSolution*> retained;
    for (const WorstCaseSolution& s : found) {
      record.max_objective = std::max(record.max_objective, s.objective);
      if (!(s.objective > result.threshold)) continue;
      const bool duplicate = std::any_of(retained.begin(), retained.end(), [&](const WorstCaseSolution* r) {
        return (r->u - s.u).lpNorm<Eigen::Infinity>() <= config.dedup_tol;
      });
      if (!duplicate) retained.push_back(&s);
    }
    record.unique_solutions = static_cast<int>(retained.size());

    if (retained.empty()) {
      record.rows_before = record.rows_after = region.rows();
      record.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      result.iterations.push_back(record);
      result.converged = true;
      break;
    }

    for (std::size_t s = 0; s < retained.size(); ++s) {
      const WorstCaseSolution& sol = *retained[s];
      const Matrix H = family.H(sol.u);
      const Vector h = family.h(sol.u);
      // Rows that do not cut the current region are implied by it and would
      // be pruned immediately; only the violated ones are appended.
      std::vector<Index> rows;
      for (Index i = 0; i < H.rows(); ++i) {
        if (sol.row_violation(i) > 0.0) rows.push_back(i);
      }
      Matrix cut(static_cast<Index>(rows.size()), H.cols());
      Vector rhs(static_cast<Index>(rows.size()));
      std::vector<RowLabel> labels;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        cut.row(static_cast<Index>(r)) = H.row(rows[r]);
        rhs(static_cast<Index>(r)) = h(rows[r]);
        RowLabel label = family.labels[static_cast<std::size_t>(rows[r])];
        label.iteration = it;
        label.solution = static_cast<int>(result.solutions.size());
        labels.push_back(std::move(label));
      }
      region.append(cut, rhs, labels);
      result.solutions.push_back({it, sol.start_index, sol.objective, sol.u});
    }
    record.rows_before = region.rows();
    try {
      region = remove_redundant(region);
    } catch (const EmptyRegionError&) {
      throw EmptyRegionError("compute_rfr: robust region became empty in outer iteration " + std::to_string(it) +
                             " after adding cuts from " + std::to_string(retained.size()) + " worst-case solutions");
    }
    record.rows_after = region.rows();
    record.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.iterations.push_back(record);
  }
  result.rfr = std::move(region);
  return result;
}

}  // namespace rfr
