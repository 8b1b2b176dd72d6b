#pragma once

// Generalized cones I x_f X over finite length spaces, discretized as a
// uniform t-grid times the fiber points. The causal predicate is exact:
// q is in J+(p) iff t_p <= t_q and d(x_p, x_q) <= G(t_q) - G(t_p).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nullgeo/matrix.hpp"
#include "nullgeo/metric_core.hpp"
#include "nullgeo/warping.hpp"

namespace nullgeo {

enum class CausalKind { None, Causal, Chronological };

std::string to_string(CausalKind kind);

// Shared predicate: classifies a pair whose G-increment (later minus
// earlier) is delta_g and whose fiber distance is d. Equality up to a
// relative 1e-12 band counts as causal and not chronological.
CausalKind classify(double delta_g, double d);

struct ConePoint {
  std::size_t level = 0;
  std::size_t fiber = 0;
};

class ConeGrid {
 public:
  ConeGrid(WarpingFunction warping, FiniteLengthSpace fiber, std::size_t n_t = kDefaultNt);

  const Interval& interval() const { return warping_.domain(); }
  const WarpingFunction& warping() const { return warping_; }
  const FiniteLengthSpace& fiber() const { return fiber_; }
  std::size_t n_t() const { return n_t_; }
  std::size_t levels() const { return n_t_ + 1; }
  std::size_t fiber_size() const { return fiber_.size(); }
  std::size_t size() const { return levels() * fiber_.size(); }
  double dt() const { return dt_; }
  double t(std::size_t level) const { return t_[level]; }
  double G_level(std::size_t level) const { return g_[level]; }

  std::size_t index(std::size_t level, std::size_t fiber) const { return level * fiber_.size() + fiber; }
  ConePoint point(std::size_t index) const { return {index / fiber_.size(), index % fiber_.size()}; }
  // Grid level at t; throws InputError when t is outside I or off the grid.
  std::size_t level_of(double t) const;

  // Relation of v to u in the future direction (None when t_v < t_u).
  CausalKind relation(std::size_t u, std::size_t v) const;
  // Causal in either time direction.
  bool related(std::size_t u, std::size_t v) const;
  // D((t, x), (t', x')) = |t - t'| + d(x, x').
  double product_distance(std::size_t u, std::size_t v) const;

 private:
  WarpingFunction warping_;
  FiniteLengthSpace fiber_;
  std::size_t n_t_;
  double dt_;
  std::vector<double> t_;
  std::vector<double> g_;
};

// Exact predicate for cone points with arbitrary t in I.
CausalKind causal_relation(const ConeGrid& grid, double t_p, std::size_t x_p, double t_q, std::size_t x_q);

// Null distance for tau = t on the grid. The search graph is a reduction of
// the causal relation (every causal pair is joined by a future chain with the
// same total time increment), so shortest paths agree with the graph on all
// causal pairs.
class NullDistanceSolver {
 public:
  explicit NullDistanceSolver(ConeGrid grid);

  const ConeGrid& grid() const { return grid_; }
  std::size_t edge_count() const { return targets_.size() / 2; }

  // d_hat from source to every grid point (+inf when unreachable).
  std::vector<double> row(std::size_t source) const;
  // Same in units of grid steps; UINT32_MAX when unreachable.
  std::vector<std::uint32_t> row_steps(std::size_t source) const;
  // Null distance for tau = phi(t), phi given at the grid levels.
  std::vector<double> row_phi(std::size_t source, const std::vector<double>& phi_levels) const;
  // Minimizing vertex path from p to q; ties go to the smaller index.
  std::vector<std::size_t> path(std::size_t p, std::size_t q) const;

  // Full matrix; SizeError above max_points grid points.
  RealMatrix matrix(std::size_t max_points = 4096) const;

  // Calls visit(source, row) for each source in order.
  void for_each_row(const std::vector<std::size_t>& sources,
                    const std::function<void(std::size_t, const std::vector<double>&)>& visit) const;

 private:
  ConeGrid grid_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> targets_;
  std::vector<std::uint32_t> spans_;
  std::uint32_t max_span_ = 1;
};

// Longest-path time separation over single-t-step edges with midpoint-f
// segment lengths sqrt(dt^2 - f(t_mid)^2 d^2), clamped at 0. Entries are 0
// unless the pair is chronological.
class TimeSeparationSolver {
 public:
  explicit TimeSeparationSolver(ConeGrid grid);

  const ConeGrid& grid() const { return grid_; }

  std::vector<double> row(std::size_t source, std::vector<std::size_t>* parent = nullptr) const;
  // DP path from p to q (empty when rho(p, q) = 0 and p != q).
  std::vector<std::size_t> path(std::size_t p, std::size_t q) const;
  // Length of a single-step edge u -> v.
  double step_length(std::size_t u, std::size_t v) const;
  RealMatrix matrix(std::size_t max_points = 4096) const;

 private:
  ConeGrid grid_;
  std::vector<std::vector<std::uint32_t>> by_distance_;  // per fiber point, sorted by distance
  std::vector<double> f_mid_;
};

struct BoundsReport {
  std::size_t pairs_checked = 0;
  double causal_max_error = 0.0;      // |d_hat - |dt|| on causal pairs
  std::size_t lower_violations = 0;   // d_hat < f_min d
  double max_upper_excess = 0.0;      // d_hat - f_max d on non-causal pairs
  std::size_t zero_off_diagonal = 0;  // definiteness failures
  std::size_t unreachable = 0;
  bool pass = true;                   // lower exact, upper within tol, definite
  std::string hint;
};

// Checks the lower and upper Lipschitz bounds for rows from the given sources.
BoundsReport check_null_distance_bounds(const NullDistanceSolver& solver, const std::vector<std::size_t>& sources,
                                        double upper_tol);

struct SandwichBoundsReport {
  std::size_t pairs_checked = 0;
  std::size_t lower_violations = 0;  // min(1, f_min) d1 > d_f
  double max_upper_excess = 0.0;     // d_f - max(1, f_max) d1
  bool pass = true;
};

// Compares d_f against d_1 on identical grids.
SandwichBoundsReport check_sandwich_bounds(const NullDistanceSolver& solver_f, const NullDistanceSolver& solver_1,
                                           const std::vector<std::size_t>& sources, double upper_tol);

struct TimeReparametrization {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
};

// phi at the grid levels; InputError unless strictly increasing.
std::vector<double> phi_levels(const ConeGrid& grid, const TimeReparametrization& phi);

struct PhiReport {
  double c = 0.0;  // max over I of 1 / (phi'(t) f(t))
  std::size_t causal_pairs = 0;
  std::size_t noncausal_pairs = 0;
  double causal_max_error = 0.0;
  std::size_t gap_violations = 0;
  double worst_gap_margin = 0.0;  // min over non-causal pairs of d_phi - bound
  bool pass = true;
};

// Causal pairs: d_phi = phi(t_q) - phi(t_p). Non-causal pairs with t_p <= t_q:
// d_phi >= phi(t_q) - phi(t_p) + (d - (G(t_q) - G(t_p))) / c.
PhiReport check_phi_time_function(const NullDistanceSolver& solver, const TimeReparametrization& phi,
                                  const std::vector<std::size_t>& sources);

struct FiberComparison {
  std::size_t level = 0;
  double min_ratio = 0.0;  // d_hat / d over fiber pairs
  double max_ratio = 0.0;
  bool lower_ok = true;
  double max_upper_excess = 0.0;  // d_hat - f_max d
  double max_identity_error = 0.0;  // |d_hat - d|, reported for f = 1
  double tol = 0.0;
  bool pass = true;
};

// Compares d_hat on the slice t = t0 with the fiber metric. tol < 0 selects
// the default 2 dt.
FiberComparison fiber_metric_comparison(const NullDistanceSolver& solver, double t0, double tol = -1.0);

struct RunDefect {
  std::size_t start = 0;
  std::size_t end = 0;
  int direction = 0;  // +1 future, -1 past
  double defect = 0.0;  // (G(t_end) - G(t_start)) - d(fiber ends), signed by direction
};

struct MinimizerAnalysis {
  bool vacuous = false;
  std::string diagnostic;
  std::vector<std::size_t> path;
  std::vector<RunDefect> runs;
  double grid_scale = 0.0;
};

MinimizerAnalysis minimizer_analysis(const NullDistanceSolver& solver, std::size_t p, std::size_t q);

}  // namespace nullgeo
