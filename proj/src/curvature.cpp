#include "nullgeo/curvature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "nullgeo/error.hpp"

namespace nullgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::size_t pick(std::mt19937_64& rng, const std::vector<double>& row) {
  std::vector<std::size_t> candidates;
  for (std::size_t v = 0; v < row.size(); ++v) {
    if (row[v] > 0.0) candidates.push_back(v);
  }
  return candidates.empty() ? row.size() : candidates[draw(rng, candidates.size())];
}

bool admissible(double curvature, double a, double b, double c) {
  try {
    realize_timelike_triangle(curvature, a, b, c);
    return true;
  } catch (const ModelConstraintError&) {
    return false;
  }
}

const std::vector<std::size_t>& side_path(const TimelikeTriangle& t, Side side) {
  switch (side) {
    case Side::XY: return t.path_xy;
    case Side::YZ: return t.path_yz;
    case Side::XZ: return t.path_xz;
  }
  return t.path_xz;
}

double side_of(const TimelikeTriangle& t, Side side) {
  switch (side) {
    case Side::XY: return t.a;
    case Side::YZ: return t.b;
    case Side::XZ: return t.c;
  }
  return t.c;
}

struct Snap {
  std::size_t vertex = 0;
  double achieved = 0.0;
};

// Path vertex whose accumulated rho is nearest to the target.
Snap snap(const TimeSeparationSolver& solver, const std::vector<std::size_t>& path, double target) {
  Snap best{path.front(), 0.0};
  double acc = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    acc += solver.step_length(path[k - 1], path[k]);
    if (std::abs(acc - target) < std::abs(best.achieved - target)) best = {path[k], acc};
  }
  return best;
}

double rho_pair(const TimeSeparationSolver& solver, std::size_t p, std::size_t q) {
  if (p == q) return 0.0;
  const ConeGrid& grid = solver.grid();
  const ConePoint a = grid.point(p), b = grid.point(q);
  if (a.level < b.level) return solver.row(p)[q];
  if (b.level < a.level) return solver.row(q)[p];
  return 0.0;
}

double model_pair(double curvature, const ModelPoint& p, const ModelPoint& q) {
  return l2k_time_separation(curvature, p, q) + l2k_time_separation(curvature, q, p);
}

double margin_of(BoundDirection direction, double rho, double rho_model) {
  return direction == BoundDirection::Lower ? rho - rho_model : rho_model - rho;
}

// Maps a point of a cone grid to the grid of a refinement that keeps indices.
std::size_t lift_index(const ConeGrid& from, const ConeGrid& to, std::size_t v) {
  const ConePoint p = from.point(v);
  return to.index(p.level, p.fiber);
}

constexpr std::array<std::pair<Side, Side>, 5> kSidePairs{{{Side::XY, Side::XZ},
                                                           {Side::YZ, Side::XZ},
                                                           {Side::XY, Side::YZ},
                                                           {Side::XZ, Side::XZ},
                                                           {Side::XY, Side::XY}}};

constexpr std::array<std::pair<double, double>, 5> kFractions{{{0.5, 0.5},
                                                               {0.5, 0.5},
                                                               {0.5, 0.5},
                                                               {0.25, 0.75},
                                                               {0.25, 0.75}}};

}  // namespace

TriangleSample sample_timelike_triangles(const TimeSeparationSolver& solver, std::size_t count, std::uint64_t seed,
                                         double curvature, double side_cap) {
  TriangleSample out;
  if (count == 0) return out;
  const ConeGrid& grid = solver.grid();
  const LorentzianModelPlane plane(curvature);
  const double bound = plane.size_bound();
  std::mt19937_64 rng(seed);
  const std::size_t max_attempts = 200 * count;
  while (out.triangles.size() < count && out.attempts < max_attempts) {
    ++out.attempts;
    const std::size_t x = draw(rng, grid.size());
    const auto row_x = solver.row(x);
    const std::size_t y = pick(rng, row_x);
    if (y == row_x.size()) continue;
    const auto row_y = solver.row(y);
    const std::size_t z = pick(rng, row_y);
    if (z == row_y.size() || !(row_x[z] > 0.0)) continue;
    const ConePoint px = grid.point(x), py = grid.point(y), pz = grid.point(z);
    if (px.fiber == py.fiber && py.fiber == pz.fiber) continue;
    TimelikeTriangle t;
    t.x = x;
    t.y = y;
    t.z = z;
    t.a = row_x[y];
    t.b = row_y[z];
    t.c = row_x[z];
    if (std::max({t.a, t.b, t.c}) > side_cap) {
      ++out.filtered_cap;
      continue;
    }
    if (!(std::max({t.a, t.b, t.c}) < bound) || !admissible(curvature, t.a, t.b, t.c)) {
      ++out.filtered_size;
      continue;
    }
    t.path_xy = solver.path(x, y);
    t.path_yz = solver.path(y, z);
    t.path_xz = solver.path(x, z);
    out.triangles.push_back(std::move(t));
  }
  if (out.triangles.empty()) {
    out.diagnostic = "no timelike triangles found in " + std::to_string(out.attempts) + " attempts";
  } else if (out.triangles.size() < count) {
    out.diagnostic = "only " + std::to_string(out.triangles.size()) + " of " + std::to_string(count) + " triangles found";
  }
  return out;
}

std::string to_string(BoundDirection direction) { return direction == BoundDirection::Lower ? "lower" : "upper"; }

double probe_margin(const TimeSeparationSolver& solver, const TimelikeTriangle& triangle, double curvature,
                    BoundDirection direction, const ProbeWitness& witness) {
  const ComparisonTriangle model = realize_timelike_triangle(curvature, triangle.a, triangle.b, triangle.c);
  const double rho = rho_pair(solver, witness.p, witness.q);
  const double rho_model = model_pair(curvature, point_on_side(model, witness.side_p, witness.s_p),
                                      point_on_side(model, witness.side_q, witness.s_q));
  return margin_of(direction, rho, rho_model);
}

CurvatureVerdict triangle_comparison(const TimeSeparationSolver& solver, const TimeSeparationSolver* refined,
                                     const TimelikeTriangle& triangle, double curvature, BoundDirection direction,
                                     std::size_t n_probe, double tol) {
  const ComparisonTriangle model = realize_timelike_triangle(curvature, triangle.a, triangle.b, triangle.c);
  CurvatureVerdict verdict;
  verdict.curvature = curvature;
  verdict.direction = direction;
  verdict.tol = tol;
  std::vector<double> margins;
  for (std::size_t k = 0; k < n_probe; ++k) {
    const auto [side_p, side_q] = kSidePairs[k % kSidePairs.size()];
    auto [lambda_p, lambda_q] = kFractions[k % kFractions.size()];
    // Later rounds shift the fractions so probes do not repeat.
    const double shift = 0.1 * static_cast<double>(k / kSidePairs.size());
    lambda_p = std::fmod(lambda_p + shift, 1.0);
    lambda_q = std::fmod(lambda_q + 0.5 * shift, 1.0);
    const auto& path_p = side_path(triangle, side_p);
    const auto& path_q = side_path(triangle, side_q);
    if (path_p.empty() || path_q.empty()) throw InputError("triangle side without a realizing path");
    const double target_p = lambda_p * side_of(triangle, side_p);
    const double target_q = lambda_q * side_of(triangle, side_q);
    const Snap sp = snap(solver, path_p, target_p);
    const Snap sq = snap(solver, path_q, target_q);
    verdict.snap_error = std::max({verdict.snap_error, std::abs(sp.achieved - target_p), std::abs(sq.achieved - target_q)});

    ProbeWitness w;
    w.side_p = side_p;
    w.side_q = side_q;
    w.s_p = sp.achieved;
    w.s_q = sq.achieved;
    w.p = sp.vertex;
    w.q = sq.vertex;
    w.rho = rho_pair(solver, w.p, w.q);
    w.rho_model = model_pair(curvature, point_on_side(model, side_p, w.s_p), point_on_side(model, side_q, w.s_q));
    w.margin = margin_of(direction, w.rho, w.rho_model);
    ++verdict.probes;
    if (refined) {
      const double fine = rho_pair(*refined, lift_index(solver.grid(), refined->grid(), w.p),
                                   lift_index(solver.grid(), refined->grid(), w.q));
      verdict.dp_error = std::max(verdict.dp_error, std::abs(fine - w.rho));
    }
    margins.push_back(w.margin);
    if (!verdict.worst || w.margin > verdict.worst->margin) verdict.worst = w;
  }
  const double allowed = tol + verdict.snap_error;
  for (double m : margins) {
    if (m > allowed) ++verdict.violations;
  }
  verdict.tolerance_ok = tol >= verdict.dp_error;
  verdict.pass = verdict.violations == 0 && verdict.tolerance_ok;
  return verdict;
}

ConcavityVerdict concavity_check(const WarpingFunction& f, double k_prime, bool convex) {
  ConcavityVerdict out;
  if (f.twice_differentiable()) {
    bool first = true;
    for (double t : f.sample_grid()) {
      const double value = f.second_derivative(t) - k_prime * f.value(t);
      if (first || (convex ? value < out.worst_value : value > out.worst_value)) {
        out.worst_t = t;
        out.worst_value = value;
        first = false;
      }
      if (convex ? value < -1e-9 : value > 1e-9) out.pass = false;
    }
    return out;
  }
  const auto& t = f.knots();
  const auto& v = f.params();
  if (t.size() < 3) {
    out.pass = false;
    out.diagnostic = "tabulated warping needs at least 3 knots for second differences";
    return out;
  }
  out.worst_t = t[1];
  out.worst_value = -kInf;
  if (convex) out.worst_value = kInf;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
    const double second = 2.0 * ((v[i + 1] - v[i]) / h1 - (v[i] - v[i - 1]) / h0) / (h0 + h1);
    const double value = second - k_prime * v[i];
    if (convex ? value < out.worst_value : value > out.worst_value) {
      out.worst_t = t[i];
      out.worst_value = value;
    }
    if (convex ? value < -1e-9 : value > 1e-9) out.pass = false;
  }
  return out;
}

double compute_K(const WarpingFunction& f, double k_prime) {
  double best = -kInf;
  for (double t : f.sample_grid()) {
    const double v = f.value(t), d = f.derivative(t);
    best = std::max(best, k_prime * v * v - d * d);
  }
  return best;
}

std::string to_string(PersistenceMode mode) {
  switch (mode) {
    case PersistenceMode::Product: return "product";
    case PersistenceMode::MinkowskiCone: return "minkowski-cone";
    case PersistenceMode::Warped: return "warped";
  }
  return "product";
}

namespace {

void run_triangles(PersistenceRow& row, const FiniteLengthSpace& fiber, const WarpingFunction& f, double curvature,
                   const PersistenceConfig& config) {
  row.triangle_k = curvature;
  const double dt = f.domain().length() / static_cast<double>(config.n_t);
  const double step = config.fiber_step > 0.0 ? config.fiber_step : 0.125 * dt;
  const bool graph = fiber.provenance() == Provenance::GraphInduced;
  const FiniteLengthSpace cone_fiber = graph ? fiber.refined(step) : fiber;
  const TimeSeparationSolver solver(ConeGrid(f, cone_fiber, config.n_t));
  std::optional<TimeSeparationSolver> fine;
  if (graph) fine.emplace(ConeGrid(f, cone_fiber.refined(0.5 * step), config.n_t));
  const TriangleSample sample =
      sample_timelike_triangles(solver, config.n_triangles, config.seed, curvature, config.side_cap);
  row.triangles = sample.triangles.size();
  if (sample.triangles.empty()) {
    row.triangle_pass = false;
    row.diagnostic = sample.diagnostic;
    return;
  }
  row.worst_margin = -kInf;
  for (const auto& t : sample.triangles) {
    const CurvatureVerdict v = triangle_comparison(solver, fine ? &*fine : nullptr, t, curvature, BoundDirection::Lower,
                                                   config.n_probe, config.tol);
    if (!v.pass) row.triangle_pass = false;
    row.dp_error = std::max(row.dp_error, v.dp_error);
    if (v.worst) row.worst_margin = std::max(row.worst_margin, v.worst->margin);
  }
  if (row.dp_error > config.tol) row.diagnostic = "measured DP error exceeds tol";
}

}  // namespace

PersistenceReport persistence_experiment(const std::vector<FiniteLengthSpace>& fibers,
                                         const std::vector<std::string>& labels, const FiniteLengthSpace& limit,
                                         const std::vector<WarpingFunction>& warpings,
                                         const PersistenceConfig& config) {
  PersistenceReport report;
  report.mode = config.mode;
  std::vector<const FiniteLengthSpace*> spaces;
  for (const auto& f : fibers) spaces.push_back(&f);
  spaces.push_back(&limit);
  auto label_of = [&](std::size_t i) {
    if (i == fibers.size()) return std::string("limit");
    return i < labels.size() ? labels[i] : "fiber " + std::to_string(i);
  };

  switch (config.mode) {
    case PersistenceMode::Product: {
      const WarpingFunction one = WarpingFunction::constant(config.interval, 1.0);
      for (std::size_t i = 0; i < spaces.size(); ++i) {
        PersistenceRow row;
        row.label = label_of(i);
        row.is_limit = i == fibers.size();
        row.quadruple_pass = quadruple_curvature_check(*spaces[i], 0.0, config.quadruple_tol).pass;
        run_triangles(row, *spaces[i], one, 0.0, config);
        report.rows.push_back(row);
      }
      break;
    }
    case PersistenceMode::MinkowskiCone: {
      if (!(config.interval.a > 0.0)) {
        throw ParameterError("the Minkowski-cone mode needs a truncated interval [a, b] with a > 0");
      }
      const WarpingFunction id = WarpingFunction::affine(config.interval, 0.0, 1.0);
      for (std::size_t i = 0; i < spaces.size(); ++i) {
        PersistenceRow row;
        row.label = label_of(i);
        row.is_limit = i == fibers.size();
        row.quadruple_k = -1.0;
        row.quadruple_pass = quadruple_curvature_check(*spaces[i], -1.0, config.quadruple_tol).pass;
        run_triangles(row, *spaces[i], id, 0.0, config);
        report.rows.push_back(row);
      }
      break;
    }
    case PersistenceMode::Warped: {
      if (warpings.size() != spaces.size()) {
        throw InputError("the warped mode needs one warping function per fiber plus one for the limit");
      }
      for (std::size_t i = 0; i < spaces.size(); ++i) {
        PersistenceRow row;
        row.label = label_of(i);
        row.is_limit = i == fibers.size();
        const ConcavityVerdict concave = concavity_check(warpings[i], config.k_prime);
        row.concavity_pass = concave.pass;
        row.k_n = compute_K(warpings[i], config.k_prime);
        row.quadruple_k = *row.k_n;
        row.quadruple_pass = quadruple_curvature_check(*spaces[i], *row.k_n, config.quadruple_tol).pass;
        if (!concave.pass) row.diagnostic = "warping is not (-K')-concave";
        if (row.is_limit) run_triangles(row, *spaces[i], warpings[i], config.k_prime, config);
        report.rows.push_back(row);
      }
      break;
    }
  }
  for (const auto& row : report.rows) {
    const bool has_cone = config.mode != PersistenceMode::Warped || row.is_limit;
    if (!has_cone) continue;
    const bool hypotheses = config.mode != PersistenceMode::Warped || row.concavity_pass.value_or(false);
    if (hypotheses && row.triangles > 0 && row.quadruple_pass != row.triangle_pass) report.consistent = false;
  }
  if (!report.consistent) {
    report.diagnostic = "fiber and cone verdicts disagree; compare the measured DP error with tol";
  }
  return report;
}

}  // namespace nullgeo
