#pragma once

// Timelike curvature bounds on cones: comparison of sampled timelike
// triangles with their realizations in L^2(K), concavity of warping
// functions, and the persistence experiments.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nullgeo/cone.hpp"
#include "nullgeo/metric_core.hpp"
#include "nullgeo/model_spaces.hpp"
#include "nullgeo/warping.hpp"

namespace nullgeo {

struct TimelikeTriangle {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;
  double a = 0.0;  // rho(x, y)
  double b = 0.0;  // rho(y, z)
  double c = 0.0;  // rho(x, z)
  std::vector<std::size_t> path_xy;
  std::vector<std::size_t> path_yz;
  std::vector<std::size_t> path_xz;
};

struct TriangleSample {
  std::vector<TimelikeTriangle> triangles;
  std::size_t attempts = 0;
  std::size_t filtered_size = 0;  // outside the model size restriction
  std::size_t filtered_cap = 0;   // a side above side_cap
  std::string diagnostic;
};

TriangleSample sample_timelike_triangles(const TimeSeparationSolver& solver, std::size_t count, std::uint64_t seed,
                                         double curvature = 0.0,
                                         double side_cap = std::numeric_limits<double>::infinity());

enum class BoundDirection { Lower, Upper };

std::string to_string(BoundDirection direction);

struct ProbeWitness {
  Side side_p = Side::XY;
  Side side_q = Side::XZ;
  double s_p = 0.0;  // achieved rho-parameter along side_p
  double s_q = 0.0;
  std::size_t p = 0;
  std::size_t q = 0;
  double rho = 0.0;        // rho(p, q) + rho(q, p) from the DP
  double rho_model = 0.0;  // the same in the comparison triangle
  double margin = 0.0;     // violation amount; positive is bad
};

struct CurvatureVerdict {
  double curvature = 0.0;
  BoundDirection direction = BoundDirection::Lower;
  bool pass = true;
  double tol = 0.0;
  double snap_error = 0.0;     // max |target - achieved| rho-parameter
  double dp_error = 0.0;       // max change of rho(p, q) on the refined fiber
  bool tolerance_ok = true;    // tol >= dp_error
  std::size_t probes = 0;
  std::size_t violations = 0;  // margin > tol + snap_error
  std::optional<ProbeWitness> worst;
};

// Lower: rho(p, q) <= rho'(p', q'). Upper: rho(p, q) >= rho'(p', q').
// `refined` (optional) is a solver on the same t-grid over a refinement of
// the fiber that keeps the original indices; it measures the DP error.
CurvatureVerdict triangle_comparison(const TimeSeparationSolver& solver, const TimeSeparationSolver* refined,
                                     const TimelikeTriangle& triangle, double curvature, BoundDirection direction,
                                     std::size_t n_probe, double tol);

// Recomputes the margin of a witness.
double probe_margin(const TimeSeparationSolver& solver, const TimelikeTriangle& triangle, double curvature,
                    BoundDirection direction, const ProbeWitness& witness);

struct ConcavityVerdict {
  bool pass = true;
  double worst_t = 0.0;
  double worst_value = 0.0;  // f'' - K' f at worst_t
  std::string diagnostic;
};

// f'' - K' f <= 1e-9 everywhere (>= -1e-9 when convex is set).
ConcavityVerdict concavity_check(const WarpingFunction& f, double k_prime, bool convex = false);

// sup over the oversampled grid of K' f^2 - f'^2.
double compute_K(const WarpingFunction& f, double k_prime);

enum class PersistenceMode { Product, MinkowskiCone, Warped };

std::string to_string(PersistenceMode mode);

struct PersistenceConfig {
  PersistenceMode mode = PersistenceMode::Product;
  double k_prime = 0.0;
  Interval interval{0.0, 1.0};
  std::size_t n_t = 100;
  double fiber_step = 0.0;  // refinement edge for cone fibers; 0 selects dt / 8
  std::size_t n_triangles = 10;
  std::size_t n_probe = 5;
  double tol = 0.05;
  double quadruple_tol = 1e-9;
  double side_cap = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 42;
};

struct PersistenceRow {
  std::string label;
  bool is_limit = false;
  double quadruple_k = 0.0;
  bool quadruple_pass = true;
  std::optional<bool> concavity_pass;
  std::optional<double> k_n;
  double triangle_k = 0.0;
  std::size_t triangles = 0;
  bool triangle_pass = true;
  double worst_margin = 0.0;
  double dp_error = 0.0;
  std::string diagnostic;
};

struct PersistenceReport {
  PersistenceMode mode = PersistenceMode::Product;
  std::vector<PersistenceRow> rows;
  bool consistent = true;  // fiber and cone verdicts agree on every row that has both
  std::string diagnostic;
};

// warpings: one per fiber for the warped mode, the last entry for the limit;
// ignored in the other modes.
PersistenceReport persistence_experiment(const std::vector<FiniteLengthSpace>& fibers,
                                         const std::vector<std::string>& labels, const FiniteLengthSpace& limit,
                                         const std::vector<WarpingFunction>& warpings,
                                         const PersistenceConfig& config);

}  // namespace nullgeo
