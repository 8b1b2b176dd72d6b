#pragma once

// Finite length spaces and the metric machinery built on them: validation,
// intrinsic (shortest-path) metrics, greedy epsilon-nets, correspondences and
// exact Gromov-Hausdorff distance for tiny instances, and the Alexandrov
// quadruple condition.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nullgeo/matrix.hpp"

namespace nullgeo {

inline constexpr double kMetricTolerance = 1e-12;

struct Issue {
  std::string code;                  // e.g. "symmetry", "triangle"
  std::vector<std::size_t> indices;  // witnessing indices
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;
  bool ok() const { return issues.empty(); }
};

// Lists every violated metric axiom. Throws InputError for a non-square matrix
// or non-finite entries.
ValidationReport validate_metric(const RealMatrix& dist);

enum class Provenance { MatrixInput, GraphInduced };

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

class FiniteLengthSpace {
 public:
  FiniteLengthSpace() = default;

  // Matrix input. Throws InputError listing the first violations when the
  // matrix is not a metric.
  FiniteLengthSpace(std::vector<std::string> ids, RealMatrix dist);
  explicit FiniteLengthSpace(RealMatrix dist);

  std::size_t size() const { return ids_.size(); }
  double d(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const RealMatrix& dist() const { return dist_; }
  const std::vector<std::string>& ids() const { return ids_; }
  Provenance provenance() const { return provenance_; }
  // Source graph of a graph-induced space; empty for matrix input.
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  double diameter() const;
  // Largest nearest-neighbour distance (the coarsest local resolution).
  double max_gap() const;

  // Subdivides every edge of the source graph into pieces of length at most
  // max_edge. Original points keep their indices, so the old space embeds
  // isometrically. Only for graph-induced spaces.
  FiniteLengthSpace refined(double max_edge) const;

  // Restriction of the metric to the listed points (matrix-input provenance).
  FiniteLengthSpace subspace(const std::vector<std::size_t>& indices) const;

  // A chain of points from i to j realizing d(i, j) as a sum of consecutive
  // distances. Graph-induced spaces use a shortest path of the source graph.
  std::vector<std::size_t> geodesic_chain(std::size_t i, std::size_t j) const;

 private:
  friend FiniteLengthSpace intrinsic_metric(const std::vector<WeightedEdge>&, std::size_t,
                                            std::vector<std::string>);
  friend FiniteLengthSpace path_metric(std::size_t, double);

  std::vector<std::string> ids_;
  RealMatrix dist_;
  Provenance provenance_ = Provenance::MatrixInput;
  std::vector<WeightedEdge> edges_;
};

// All-pairs shortest paths of a positively weighted undirected graph. Throws
// InputError naming the components when the graph is disconnected.
FiniteLengthSpace intrinsic_metric(const std::vector<WeightedEdge>& edges, std::size_t n,
                                   std::vector<std::string> ids = {});

// n equally spaced points on a segment of the given length.
FiniteLengthSpace path_metric(std::size_t n, double length = 1.0);

// Three legs of leg_points points each (excluding the shared centre, index 0),
// equally spaced up to leg_length.
FiniteLengthSpace tripod(std::size_t leg_points, double leg_length = 1.0);

struct EpsilonNet {
  std::vector<std::size_t> center_indices;
  double radius = 0.0;
  double covering_radius_achieved = 0.0;
};

// Greedy farthest-point net starting from index 0.
EpsilonNet epsilon_net(const FiniteLengthSpace& space, double eps);

struct Correspondence {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Throws InputError on out-of-range indices or missing projections.
void check_correspondence(const Correspondence& r, std::size_t size_a, std::size_t size_b);

double distortion(const Correspondence& r, const FiniteLengthSpace& a, const FiniteLengthSpace& b);

// Every pair of A x B.
Correspondence full_correspondence(std::size_t size_a, std::size_t size_b);

// Every correspondence between index sets of the given sizes. Meant for tiny
// inputs (size_a * size_b <= 16 keeps it below 65536 subsets).
std::vector<Correspondence> enumerate_correspondences(std::size_t size_a, std::size_t size_b);

struct GHResult {
  double distance = 0.0;
  Correspondence witness;
};

inline constexpr std::size_t kMaxExactGHPairs = 25;

// Half the least distortion over all correspondences. Refuses with SizeError
// when |A|*|B| exceeds max_pairs.
GHResult gh_distance_exact(const FiniteLengthSpace& a, const FiniteLengthSpace& b,
                           std::size_t max_pairs = kMaxExactGHPairs);

struct QuadrupleWitness {
  std::size_t p = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t c = 0;
  double angle_sum = 0.0;
  double excess = 0.0;  // angle_sum - 2*pi
  bool model_constraint = false;
  std::string note;
};

struct QuadrupleVerdict {
  double k = 0.0;
  double tol = 0.0;
  bool pass = true;
  std::size_t quadruples_checked = 0;
  std::optional<QuadrupleWitness> worst;
};

// For every point p and triple {a, b, c} of other points, the three comparison
// angles at p in M^2(k) must sum to at most 2*pi + tol.
QuadrupleVerdict quadruple_curvature_check(const FiniteLengthSpace& space, double k,
                                           double tol = 1e-9);

}  // namespace nullgeo
