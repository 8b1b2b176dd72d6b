#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nullgeo/cone.hpp"
#include "nullgeo/error.hpp"
#include "nullgeo/lpls.hpp"
#include "pls_fixtures.hpp"

using namespace nullgeo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Floyd-Warshall over causally related pairs with weight |tau(u) - tau(v)|.
RealMatrix null_oracle(const DiscretePreLengthSpace& s, const TimeFunction& tau) {
  const std::size_t n = s.size();
  RealMatrix d(n, n, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && (s.causal(i, j) || s.causal(j, i))) d(i, j) = std::abs(tau[i] - tau[j]);
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

bool has_issue(const ValidationReport& r, const std::string& code, const std::vector<std::size_t>& w) {
  return std::any_of(r.issues.begin(), r.issues.end(), [&](const Issue& i) { return i.code == code && i.indices == w; });
}

DiscretePreLengthSpace antichain(std::size_t n) {
  RealMatrix d(n, n, 1.0), rho(n, n, 0.0);
  BoolMatrix causal(n, n, false), chrono(n, n, false);
  for (std::size_t i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    causal(i, i) = true;
  }
  return {FiniteLengthSpace(d), causal, chrono, rho};
}

}  // namespace

TEST_CASE("validate_pls") {
  const auto two = fixtures::minkowski_instance({{0, 0}, {1, 0}});
  CHECK(validate_pls(two.space).ok());
  auto bad = two.space;
  bad.chrono(0, 1) = false;
  CHECK(has_issue(validate_pls(bad), "rho-chrono", {0, 1}));
  auto rt = fixtures::minkowski_instance({{0, 0}, {1, 0}, {2, 0}}).space;
  rt.rho(0, 2) = 1.0;
  CHECK(has_issue(validate_pls(rt), "reverse-triangle", {0, 1, 2}));
  for (const auto& b : fixtures::broken_instances()) {
    CAPTURE(b.axiom);
    CHECK(has_issue(validate_pls(b.space), b.axiom, b.witness));
  }
  auto shape = two.space;
  shape.rho = RealMatrix(3, 3);
  CHECK_THROWS_AS(validate_pls(shape), InputError);
}

TEST_CASE("time functions") {
  const auto two = fixtures::minkowski_instance({{0, 0}, {1, 0}});
  CHECK(check_time_function(two.space, {0, 1}).pass);
  const Verdict v = check_time_function(two.space, {1, 0});
  CHECK_FALSE(v.pass);
  CHECK(v.witness == std::vector<std::size_t>{0, 1});
  CHECK(check_time_function(antichain(3), {5, 1, 2}).pass);

  RealMatrix du(2, 2, 0.0);
  du(0, 1) = du(1, 0) = 1.0;
  CHECK(check_anti_lipschitz(two.space, {0, 2}, {0, 1}, du).pass);
  CHECK_FALSE(check_anti_lipschitz(two.space, {0, 0.5}, {0, 1}, du).pass);
  CHECK(check_anti_lipschitz(two.space, {0, 0.5}, {0}, RealMatrix(1, 1, 0.0)).pass);
  RealMatrix broken(2, 2, 0.0);
  broken(0, 1) = 1.0;
  broken(1, 0) = 2.0;
  CHECK_THROWS_AS(check_anti_lipschitz(two.space, {0, 2}, {0, 1}, broken), InputError);
}

TEST_CASE("path_null_length") {
  const auto three = fixtures::minkowski_instance({{0, 0}, {1, 0}, {3, 0}});
  const TimeFunction tau{0, 1, 3};
  CHECK(path_null_length(three.space, tau, {{1, 1}, {SegmentTag::Trivial}}) == 0.0);
  CHECK(path_null_length(three.space, tau, {{0, 1, 2}, {SegmentTag::Future, SegmentTag::Future}}) == 3.0);
  // p -> w future, then w -> q past: tau = (0, 2, 1).
  const auto zig = fixtures::minkowski_instance({{0, 0}, {2, 0}, {1, 0}});
  CHECK(path_null_length(zig.space, {0, 2, 1}, {{0, 1, 2}, {SegmentTag::Future, SegmentTag::Past}}) == 3.0);
  CHECK_THROWS_AS(path_null_length(three.space, tau, {{2, 0}, {SegmentTag::Future}}), InputError);
}

TEST_CASE("null_distance_matrix") {
  const auto two = fixtures::minkowski_instance({{0, 0}, {1, 0}});
  const auto nd = null_distance_matrix(two.space, {0, 1});
  CHECK(nd.dist(0, 1) == 1.0);
  CHECK(nd.dist(0, 0) == 0.0);

  // p, q incomparable, both below w.
  const auto diamond = fixtures::minkowski_instance({{0, -1}, {0, 1}, {1, 0}});
  const auto dd = null_distance_matrix(diamond.space, {0, 0, 1});
  CHECK(dd.dist(0, 1) == 2.0);

  const auto split = null_distance_matrix(antichain(2), {0, 1});
  CHECK(split.dist(0, 1) == kInf);
  CHECK_FALSE(split.warnings.empty());

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = fixtures::random_minkowski(seed);
    const RealMatrix got = null_distance_matrix(inst.space, inst.tau).dist;
    const RealMatrix oracle = null_oracle(inst.space, inst.tau);
    for (std::size_t i = 0; i < inst.space.size(); ++i)
      for (std::size_t j = 0; j < inst.space.size(); ++j) CHECK(got(i, j) == doctest::Approx(oracle(i, j)));
  }
}

TEST_CASE("minimizing_path realizes the null distance") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto inst = fixtures::random_minkowski(seed);
    const RealMatrix d = null_distance_matrix(inst.space, inst.tau).dist;
    for (std::size_t p = 0; p < inst.space.size(); ++p) {
      for (std::size_t q = 0; q < inst.space.size(); ++q) {
        const auto path = minimizing_path(inst.space, inst.tau, p, q);
        check_path(inst.space, path);
        CHECK(path_null_length(inst.space, inst.tau, path) == doctest::Approx(d(p, q)));
      }
    }
  }
}

TEST_CASE("properties_report") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = fixtures::random_minkowski(seed);
    const PropertyReport r = properties_report(inst.space, inst.tau);
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("causally convex neighborhood on a Minkowski strip") {
  const ConeGrid grid(WarpingFunction::constant({0, 1}, 1.0), path_metric(21), 20);
  const NullDistanceSolver nd(grid);
  const RealMatrix dhat = nd.matrix();
  const TimeSeparationSolver ts(grid);
  const std::size_t n = grid.size();
  BoolMatrix causal(n, n, false), chrono(n, n, false);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      const CausalKind k = u == v ? CausalKind::Causal : grid.relation(u, v);
      causal(u, v) = k != CausalKind::None;
      chrono(u, v) = k == CausalKind::Chronological;
    }
  }
  DiscretePreLengthSpace s{FiniteLengthSpace(dhat), causal, chrono, ts.matrix()};
  TimeFunction tau(n);
  for (std::size_t v = 0; v < n; ++v) tau[v] = grid.t(grid.point(v).level);
  std::vector<std::size_t> all(n);
  for (std::size_t v = 0; v < n; ++v) all[v] = v;

  const std::size_t p = grid.index(10, 10);
  const auto nb = causally_convex_neighborhood(s, tau, p, all, dhat, 0.1);
  CHECK(nb.certified);
  CHECK(std::find(nb.members.begin(), nb.members.end(), p) != nb.members.end());
  CHECK(nb.tau_plus.pass);
  CHECK(nb.tau_minus.pass);

  // U a small box around p: a large eps reaches its boundary.
  std::vector<std::size_t> box;
  for (std::size_t l = 8; l <= 12; ++l)
    for (std::size_t j = 8; j <= 12; ++j) box.push_back(grid.index(l, j));
  RealMatrix dbox(box.size(), box.size());
  for (std::size_t a = 0; a < box.size(); ++a)
    for (std::size_t b = 0; b < box.size(); ++b) dbox(a, b) = dhat(box[a], box[b]);
  CHECK_THROWS_AS(causally_convex_neighborhood(s, tau, p, box, dbox, 0.5), PreconditionError);
  CHECK_THROWS_AS(causally_convex_neighborhood(s, tau, grid.index(0, 0), box, dbox, 0.01), PreconditionError);
  TimeFunction slow(n);
  for (std::size_t v = 0; v < n; ++v) slow[v] = 0.5 * tau[v];
  CHECK_THROWS_AS(causally_convex_neighborhood(s, slow, p, all, dhat, 0.1), PreconditionError);

  const auto ac = antichain(3);
  const auto flat = causally_convex_neighborhood(ac, {0, 0.01, 5}, 0, {0, 1, 2}, ac.base.dist(), 0.1);
  CHECK(flat.certified);
}

TEST_CASE("rho_length and closure") {
  const auto three = fixtures::minkowski_instance({{0, 0}, {1, 0}, {2, 0}});
  CHECK(rho_length(three.space, {0, 1, 2}) == 2.0);
  const auto cl = rho_closure(three.space);
  CHECK(cl.T(0, 2) == 2.0);
  CHECK(cl.mismatches.empty());

  auto bigger = three.space;
  bigger.rho(0, 2) = 3.0;
  const auto cb = rho_closure(bigger);
  CHECK(cb.T(0, 2) == 3.0);
  CHECK(cb.mismatches.empty());

  const auto ac = antichain(2);
  CHECK(rho_closure(ac).T(0, 1) == 0.0);

  auto cyc = three.space;
  cyc.causal(2, 0) = true;
  CHECK_THROWS_AS(rho_closure(cyc), PreconditionError);
}
