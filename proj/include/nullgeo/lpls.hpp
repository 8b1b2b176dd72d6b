#pragma once

// Finite Lorentzian pre-length spaces: a finite metric space together with a
// causal preorder, a chronological relation and a time separation matrix.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nullgeo/matrix.hpp"
#include "nullgeo/metric_core.hpp"

namespace nullgeo {

struct DiscretePreLengthSpace {
  FiniteLengthSpace base;
  BoolMatrix causal;  // causal(x, y): x <= y
  BoolMatrix chrono;  // chrono(x, y): x << y
  RealMatrix rho;     // entries may be +inf

  std::size_t size() const { return base.size(); }
};

// Throws InputError when the matrices do not match the base space; otherwise
// lists every violated axiom (reflexivity, transitivity, chrono in causal,
// rho > 0 iff chrono, reverse triangle inequality).
ValidationReport validate_pls(const DiscretePreLengthSpace& space);

using TimeFunction = std::vector<double>;

struct Verdict {
  bool pass = true;
  std::vector<std::size_t> witness;
  std::string message;
};

// Pass iff tau(x) < tau(y) for every causal pair x != y.
Verdict check_time_function(const DiscretePreLengthSpace& space, const TimeFunction& tau);

// Pass iff tau(y) - tau(x) >= d_U(x, y) for all causal x, y in U. d_U is indexed
// by positions in U.
Verdict check_anti_lipschitz(const DiscretePreLengthSpace& space, const TimeFunction& tau,
                             const std::vector<std::size_t>& subset, const RealMatrix& d_subset);

enum class SegmentTag { Future, Past, Trivial };

struct PiecewiseCausalPath {
  std::vector<std::size_t> vertices;
  std::vector<SegmentTag> tags;  // one per consecutive pair
};

// Throws InputError if a tag does not match the relation between its endpoints.
void check_path(const DiscretePreLengthSpace& space, const PiecewiseCausalPath& path);

// Sum of |tau| increments over the maximal runs of equal non-trivial tags.
double path_null_length(const DiscretePreLengthSpace& space, const TimeFunction& tau,
                        const PiecewiseCausalPath& path);

struct NullDistance {
  RealMatrix dist;  // +inf for pairs joined by no piecewise causal path
  std::vector<std::string> warnings;
};

NullDistance null_distance_matrix(const DiscretePreLengthSpace& space, const TimeFunction& tau);

// One minimizing piecewise causal path from p to q; ties are broken towards
// the smaller predecessor index. Throws InputError if q is unreachable.
PiecewiseCausalPath minimizing_path(const DiscretePreLengthSpace& space, const TimeFunction& tau,
                                    std::size_t p, std::size_t q);

struct PropertyCheck {
  std::string name;
  bool pass = true;
  std::vector<std::size_t> witness;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool pass() const;
};

// Lower bound, causal exactness, diamond monotonicity, diamond boundedness and
// affine rescaling (lambda = 2, C = 5) of the null distance.
PropertyReport properties_report(const DiscretePreLengthSpace& space, const TimeFunction& tau);

struct ConvexNeighborhood {
  std::vector<std::size_t> members;
  bool certified = false;
  std::vector<std::size_t> counterexample;  // (a, w, b) with a <= w <= b, w outside
  Verdict tau_plus;
  Verdict tau_minus;
};

// U_eps(p) = {q : tau(q) - phi(q) < tau(p) < tau(q) + phi(q)} with
// phi(q) = max(0, eps - d_U(p, q) / 2) on U and 0 elsewhere. Throws
// PreconditionError when tau is not anti-Lipschitz on U or when the d_U-ball
// of radius 2 eps around p is not well inside U.
ConvexNeighborhood causally_convex_neighborhood(const DiscretePreLengthSpace& space, const TimeFunction& tau,
                                                std::size_t p, const std::vector<std::size_t>& subset,
                                                const RealMatrix& d_subset, double eps);

// Sum of rho over consecutive chain points.
double rho_length(const DiscretePreLengthSpace& space, const std::vector<std::size_t>& chain);

struct TimeSeparationClosure {
  RealMatrix T;  // longest causal chain length, 0 if unreachable
  std::vector<std::pair<std::size_t, std::size_t>> mismatches;  // rho != T
};

// Throws PreconditionError on a causal cycle through distinct points.
TimeSeparationClosure rho_closure(const DiscretePreLengthSpace& space);

}  // namespace nullgeo
