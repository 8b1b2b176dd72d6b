#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "nullgeo/convergence.hpp"
#include "nullgeo/error.hpp"

using namespace nullgeo;

namespace {

struct SandwichOracle {
  std::size_t lower = 0;
  std::size_t upper = 0;
  double deviation = 0.0;
};

// Recomputes the two-sided estimate from the raw rows.
SandwichOracle sandwich_oracle(const WarpingFunction& fj, const WarpingFunction& f, const FiniteLengthSpace& x,
                               std::size_t n_t, const std::vector<std::size_t>& sources) {
  const NullDistanceSolver sj(ConeGrid(fj, x, n_t)), sf(ConeGrid(f, x, n_t));
  double eps = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double t = f.domain().a + f.domain().length() * k / 1000.0;
    eps = std::max(eps, std::abs(f.value(t) - fj.value(t)));
  }
  const double m = f.f_min();
  SandwichOracle out;
  for (std::size_t s : sources) {
    const auto a = sj.row(s), b = sf.row(s);
    for (std::size_t v = 0; v < a.size(); ++v) {
      const double tol = 1e-12 * std::max(1.0, b[v]);
      if (a[v] < b[v] - eps - 3 * eps * b[v] / m - tol) ++out.lower;
      if (a[v] > b[v] + eps + 8 * eps * eps / m + 8 * eps * b[v] / m + tol) ++out.upper;
      out.deviation = std::max(out.deviation, std::abs(a[v] - b[v]));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("sample_sources") {
  CHECK(sample_sources(5, 10, 1) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  const auto s = sample_sources(1000, 10, 3);
  REQUIRE(s.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(s[k] >= 100 * k);
    CHECK(s[k] < 100 * (k + 1));
  }
  CHECK(sample_sources(1000, 10, 3) == s);
  CHECK(sample_sources(1000, 0, 3).empty());
}

TEST_CASE("sandwich against an independent recomputation") {
  const Interval iv{0, 1};
  const auto f = WarpingFunction::constant(iv, 1.0);
  WarpingSequence seq{{}, {}, f, 0.5};
  for (int j : {5, 10, 100}) {
    seq.members.push_back(WarpingFunction::affine(iv, 1.0, 1.0 / j));
    seq.labels.push_back("j=" + std::to_string(j));
  }
  seq.members.push_back(WarpingFunction::affine(iv, 1.0, 0.5));
  seq.labels.push_back("far");
  const auto x = path_metric(9);
  const std::vector<std::size_t> sources{0, 13, 40, 77};
  const auto report = null_convergence_check(seq, x, 8, sources);
  REQUIRE(report.rows.size() == 4);
  std::size_t violations = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& row = report.rows[k];
    CAPTURE(row.label);
    CHECK_FALSE(row.excluded);
    const auto oracle = sandwich_oracle(seq.members[k], f, x, 8, sources);
    CHECK(row.lower_violations == oracle.lower);
    CHECK(row.upper_violations == oracle.upper);
    violations += oracle.lower + oracle.upper;
    CHECK(row.sup_deviation == doctest::Approx(oracle.deviation).epsilon(1e-12));
    CHECK(row.eps == doctest::Approx(1.0 / (5 + 5 * (k == 1) + 95 * (k == 2))).epsilon(1e-12));
    CHECK(row.pairs == sources.size() * 81);
  }
  CHECK(report.rows[3].excluded);
  const auto edge = null_convergence_check({{WarpingFunction::affine(iv, 1.0, 0.25)}, {"j=4"}, f, 0.5}, x, 8, sources);
  CHECK(edge.rows[0].excluded);
  CHECK(report.rows[3].diagnostic.find("f_min / 4") != std::string::npos);
  // The coarse grid breaks the estimate for j = 100; the report must say so.
  CHECK(violations > 0);
  CHECK(report.sandwich_holds == (violations == 0));
  CHECK(report.deviation_nonincreasing);
}

TEST_CASE("members below the lower bound are excluded") {
  const Interval iv{0, 1};
  WarpingSequence seq{{WarpingFunction::constant(iv, 0.95)}, {"low"}, WarpingFunction::constant(iv, 1.0), 0.99};
  const auto r = null_convergence_check(seq, path_metric(3), 4, {0});
  CHECK(r.rows[0].excluded);
  CHECK(r.rows[0].pairs == 0);
}

TEST_CASE("product_space") {
  const auto p = product_space(path_metric(2), {0.0, 0.3, 1.0});
  CHECK(p.size() == 6);
  CHECK(p.d(0, 1) == 1.0);
  CHECK(p.d(0, 4) == 1.0);
  CHECK(p.d(0, 2) == doctest::Approx(0.3));
  CHECK(p.d(1, 2) == 1.0);
  CHECK(p.ids()[3] == "1:" + path_metric(2).ids()[1]);
}

TEST_CASE("lift_correspondence") {
  const Interval iv{0, 1};
  const auto one = WarpingFunction::constant(iv, 1.0);
  RealMatrix two(2, 2, 0.0);
  two(0, 1) = two(1, 0) = 0.5;
  const ConeGrid a(one, FiniteLengthSpace(two), 2);
  const ConeGrid b(one, path_metric(3), 2);
  const Correspondence r{{{0, 0}, {1, 1}, {1, 2}}};
  const auto lifted = lift_correspondence(r, a, b);
  CHECK(lifted.lifted.pairs.size() == 9);
  CHECK(lifted.base_distortion == doctest::Approx(0.5));
  CHECK(lifted.lifted_distortion <= lifted.base_distortion + 1e-15);
  // Brute-force lifted distortion on the product spaces.
  const auto pa = product_space(a.fiber(), {0, 0.5, 1});
  const auto pb = product_space(b.fiber(), {0, 0.5, 1});
  CHECK(distortion(lifted.lifted, pa, pb) == doctest::Approx(lifted.lifted_distortion));
  const ConeGrid warped(WarpingFunction::constant(iv, 2.0), path_metric(3), 2);
  CHECK_THROWS_AS(lift_correspondence(r, a, warped), UnsupportedError);
  const ConeGrid finer(one, path_metric(3), 4);
  CHECK_THROWS_AS(lift_correspondence(r, a, finer), InputError);
}

TEST_CASE("epsilon isometry between nearby cones") {
  const Interval iv{0, 1};
  const NullDistanceSolver sf(ConeGrid(WarpingFunction::constant(iv, 1.0), path_metric(21), 20));
  const NullDistanceSolver sn(ConeGrid(WarpingFunction::constant(iv, 1.05), path_metric(21), 20));
  const std::size_t p0 = sf.grid().index(10, 10);
  const double eps = isometry_eps(sf, sn, 0.3, p0);
  CHECK(eps > 0.0);
  CHECK(eps < 0.25);
  const auto iso = epsilon_isometry(sf, sn, 0.3, p0, eps);
  CHECK(iso.pass);
  CHECK(iso.max_distortion <= 3 * eps + 1e-12);
  CHECK(iso.net_radius <= eps + 1e-12);
  CHECK(iso.gh_bound == doctest::Approx(6 * eps));
  CHECK(iso.image.size() == iso.domain.size());
  const std::set<std::size_t> codomain(iso.codomain.begin(), iso.codomain.end());
  for (std::size_t q : iso.image) CHECK(codomain.count(q) == 1);

  CHECK_THROWS_AS(epsilon_isometry(sf, sn, 0.3, p0, 0.0), PreconditionError);
  const NullDistanceSolver other(ConeGrid(WarpingFunction::constant(iv, 1.0), path_metric(11), 20));
  CHECK_THROWS_AS(isometry_eps(sf, other, 0.3, p0), InputError);
  CHECK_THROWS_AS(epsilon_isometry(sf, sn, -1.0, p0, 0.1), ParameterError);
}

TEST_CASE("uniform total boundedness") {
  const Interval iv{0, 1};
  const std::vector<WarpingFunction> family{WarpingFunction::constant(iv, 1.0), WarpingFunction::constant(iv, 2.0),
                                            WarpingFunction::constant(iv, 3.0), WarpingFunction::constant(iv, 4.0)};
  // The greedy net of a 20-point path covers within 4/19 < eps, which leaves room for the grid overshoot.
  const auto cert = uniform_total_boundedness(family, {"1", "2", "3", "4"}, 3.0, path_metric(20), 96, 0.25);
  CHECK(cert.pass);
  CHECK(cert.mesh_bound == doctest::Approx(0.75));
  CHECK(cert.certified.size() == 3);
  CHECK(cert.excluded.size() == 1);
  CHECK(cert.net_points.size() == cert.t_net.size() * cert.fiber_net.size());
  for (double a : cert.achieved) CHECK(a <= cert.mesh_bound + 1e-12);
  CHECK_THROWS_AS(uniform_total_boundedness({}, {}, 1.0, path_metric(3), 2, 0.1), InputError);
  CHECK_THROWS_AS(uniform_total_boundedness(family, {}, 1.0, path_metric(3), 2, 0.0), ParameterError);
}
