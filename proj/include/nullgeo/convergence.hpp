#pragma once

// Convergence experiments for families of cones: the two-sided sandwich for
// uniformly close warping functions, lifting fiber correspondences to product
// cones, explicit 3 eps-isometries between balls, and uniform nets.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nullgeo/cone.hpp"
#include "nullgeo/metric_core.hpp"

namespace nullgeo {

struct WarpingSequence {
  std::vector<WarpingFunction> members;
  std::vector<std::string> labels;  // e.g. "j=10"
  WarpingFunction limit;
  double lower_bound = 0.0;
};

struct SandwichRow {
  std::string label;
  double eps = 0.0;  // sup norm to the limit
  bool excluded = false;
  std::string diagnostic;
  std::size_t pairs = 0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
  double min_lower_margin = 0.0;  // d_fj - (d_f - eps (1 + 3 d_f / f_min))
  double min_upper_margin = 0.0;  // d_f + eps (1 + 8 eps / f_min + 8 d_f / f_min) - d_fj
  double sup_deviation = 0.0;     // max |d_fj - d_f|
};

struct ConvergenceReport {
  std::vector<SandwichRow> rows;
  bool sandwich_holds = true;
  bool deviation_nonincreasing = true;
};

// Deterministic row sample: every grid point when the grid has at most
// max_rows points, else max_rows points drawn with the given seed.
std::vector<std::size_t> sample_sources(std::size_t grid_size, std::size_t max_rows, std::uint64_t seed);

// Checks the two-sided estimate for every member against the limit on
// identical grids, for all pairs (source, v) with source in `sources`.
ConvergenceReport null_convergence_check(const WarpingSequence& sequence, const FiniteLengthSpace& fiber,
                                         std::size_t n_t, const std::vector<std::size_t>& sources,
                                         double deviation_tol = 0.0);

// Product cone with d_1 = max(d, |dt|) over the given t-grid.
FiniteLengthSpace product_space(const FiniteLengthSpace& fiber, const std::vector<double>& t_grid);

struct LiftedCorrespondence {
  Correspondence lifted;  // indices level * |X| + j
  double base_distortion = 0.0;
  double lifted_distortion = 0.0;
};

// Lifts R between fibers to {((t, x_n), (t, x))}. Both grids must share the
// interval and n_t and have f = 1 (UnsupportedError otherwise).
LiftedCorrespondence lift_correspondence(const Correspondence& r, const ConeGrid& cone_n, const ConeGrid& cone);

struct EpsilonIsometry {
  std::vector<std::size_t> domain;      // D^{d_f}_r(p0)
  std::vector<std::size_t> codomain;    // D^{d_fn}_r(p0)
  std::vector<std::size_t> image;       // F(p) for p in domain, aligned with domain
  std::size_t reassigned = 0;
  double eps = 0.0;
  double max_distortion = 0.0;          // |d_f(p,q) - d_fn(F p, F q)|
  double net_radius = 0.0;              // covering radius of the image in the codomain
  double gh_bound = 0.0;                // 6 eps
  bool pass = false;
};

// Smallest eps (up to 1e-12) for which the ball inclusions and the pairwise
// deviation bound hold on the grid.
double isometry_eps(const NullDistanceSolver& solver_f, const NullDistanceSolver& solver_fn, double r, std::size_t p0);

// Builds F per the ball construction. Throws PreconditionError naming the
// violated inclusion, ConstructionError if no reassignment within eps exists.
EpsilonIsometry epsilon_isometry(const NullDistanceSolver& solver_f, const NullDistanceSolver& solver_fn, double r,
                                 std::size_t p0, double eps);

struct NetCertificate {
  std::vector<std::size_t> t_net;      // grid levels
  std::vector<std::size_t> fiber_net;  // fiber indices
  std::vector<std::size_t> net_points; // grid indices
  double mesh_bound = 0.0;             // eps * max(1, C)
  std::vector<std::string> certified;  // member labels
  std::vector<double> achieved;        // covering radius per certified member
  std::vector<std::string> excluded;   // members exceeding C, with reasons
  bool pass = false;
};

NetCertificate uniform_total_boundedness(const std::vector<WarpingFunction>& family,
                                         const std::vector<std::string>& labels, double bound_c,
                                         const FiniteLengthSpace& fiber, std::size_t n_t, double eps);

}  // namespace nullgeo
