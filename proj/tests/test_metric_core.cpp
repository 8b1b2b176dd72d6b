#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nullgeo/error.hpp"
#include "nullgeo/metric_core.hpp"

using namespace nullgeo;

namespace {

RealMatrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  RealMatrix m(n, n);
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

bool has_code(const ValidationReport& r, const std::string& code) {
  return std::any_of(r.issues.begin(), r.issues.end(), [&](const Issue& i) { return i.code == code; });
}

// Floyd-Warshall oracle.
RealMatrix apsp(std::size_t n, const std::vector<WeightedEdge>& edges) {
  const double inf = std::numeric_limits<double>::infinity();
  RealMatrix d(n, n, inf);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& e : edges) d(e.u, e.v) = d(e.v, e.u) = std::min(d(e.u, e.v), e.weight);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

// Brute force over every subset of A x B: half the least distortion.
double gh_brute(const FiniteLengthSpace& a, const FiniteLengthSpace& b) {
  const std::size_t na = a.size(), nb = b.size(), np = na * nb;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << np); ++mask) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<bool> ca(na), cb(nb);
    for (std::size_t k = 0; k < np; ++k) {
      if (mask >> k & 1) {
        pairs.emplace_back(k / nb, k % nb);
        ca[k / nb] = cb[k % nb] = true;
      }
    }
    if (std::count(ca.begin(), ca.end(), false) || std::count(cb.begin(), cb.end(), false)) continue;
    double dis = 0.0;
    for (auto [i, j] : pairs)
      for (auto [k, l] : pairs) dis = std::max(dis, std::abs(a.d(i, k) - b.d(j, l)));
    best = std::min(best, dis);
  }
  return 0.5 * best;
}

FiniteLengthSpace random_space(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = u(rng);
    y[i] = u(rng);
  }
  RealMatrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = std::hypot(x[i] - x[j], y[i] - y[j]);
  return FiniteLengthSpace(d);
}

}  // namespace

TEST_CASE("validate_metric") {
  CHECK(validate_metric(mat({{0, 1}, {1, 0}})).ok());
  const auto sym = validate_metric(mat({{0, 1}, {2, 0}}));
  REQUIRE(has_code(sym, "symmetry"));
  CHECK(sym.issues.front().indices == std::vector<std::size_t>{0, 1});
  const auto tri = validate_metric(mat({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}));
  CHECK(has_code(tri, "triangle"));
  CHECK(has_code(validate_metric(mat({{0, -1}, {-1, 0}})), "negative"));
  CHECK(has_code(validate_metric(mat({{0, 0}, {0, 0}})), "definiteness"));
  CHECK(has_code(validate_metric(mat({{1, 1}, {1, 0}})), "diagonal"));
  CHECK_THROWS_AS(validate_metric(RealMatrix(2, 3)), InputError);
  CHECK_THROWS_AS(validate_metric(mat({{0, NAN}, {NAN, 0}})), InputError);
  CHECK_THROWS_AS(FiniteLengthSpace(mat({{0, 1}, {2, 0}})), InputError);
}

TEST_CASE("intrinsic_metric") {
  const auto path = intrinsic_metric({{0, 1, 1.0}, {1, 2, 1.0}}, 3);
  CHECK(path.d(0, 2) == 2.0);
  CHECK(path.provenance() == Provenance::GraphInduced);
  const auto tri = intrinsic_metric({{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, 3);
  CHECK(tri.d(0, 2) == 1.0);
  const auto cycle = intrinsic_metric({{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}}, 4);
  CHECK(cycle.d(0, 2) == 2.0);
  CHECK(cycle.d(1, 3) == 2.0);
  try {
    intrinsic_metric({{0, 1, 1.0}, {2, 3, 1.0}}, 4);
    FAIL("disconnected graph accepted");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("component") != std::string::npos);
  }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 8;
    std::vector<WeightedEdge> edges;
    for (std::size_t i = 1; i < n; ++i) edges.push_back({rng() % i, i, w(rng)});
    for (int k = 0; k < 6; ++k) {
      const std::size_t a = rng() % n, b = rng() % n;
      if (a != b) edges.push_back({a, b, w(rng)});
    }
    const auto space = intrinsic_metric(edges, n);
    const RealMatrix oracle = apsp(n, edges);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(space.d(i, j) == doctest::Approx(oracle(i, j)).epsilon(1e-14));
  }
}

TEST_CASE("refined keeps the original points isometric") {
  const auto t = tripod(2, 1.0);
  const auto r = t.refined(0.1);
  CHECK(r.size() == 1 + 3 * 10);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) CHECK(r.d(i, j) == doctest::Approx(t.d(i, j)).epsilon(1e-14));
  CHECK_THROWS_AS(FiniteLengthSpace(mat({{0, 1}, {1, 0}})).refined(0.1), UnsupportedError);
}

TEST_CASE("geodesic_chain realizes the distance") {
  const auto t = tripod(3, 1.0).refined(0.2);
  for (std::size_t i = 0; i < t.size(); i += 3) {
    for (std::size_t j = 0; j < t.size(); j += 2) {
      const auto chain = t.geodesic_chain(i, j);
      REQUIRE(chain.front() == i);
      REQUIRE(chain.back() == j);
      double len = 0.0;
      for (std::size_t k = 1; k < chain.size(); ++k) len += t.d(chain[k - 1], chain[k]);
      CHECK(len == doctest::Approx(t.d(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("epsilon_net") {
  const auto p = path_metric(101);
  const auto net = epsilon_net(p, 0.25);
  CHECK(net.center_indices.size() <= 5);
  CHECK(net.covering_radius_achieved <= 0.25);
  for (std::size_t i = 0; i < p.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c : net.center_indices) best = std::min(best, p.d(i, c));
    CHECK(best <= net.covering_radius_achieved + 1e-15);
  }
  for (std::size_t a = 0; a < net.center_indices.size(); ++a)
    for (std::size_t b = a + 1; b < net.center_indices.size(); ++b)
      CHECK(p.d(net.center_indices[a], net.center_indices[b]) > 0.25);
  CHECK(epsilon_net(p, 2.0).center_indices.size() == 1);
  CHECK(epsilon_net(path_metric(2), 0.4).center_indices.size() == 2);
  CHECK_THROWS_AS(epsilon_net(p, 0.0), ParameterError);
}

TEST_CASE("distortion") {
  const auto a = FiniteLengthSpace(mat({{0, 1}, {1, 0}}));
  const auto b = FiniteLengthSpace(mat({{0, 1.2}, {1.2, 0}}));
  CHECK(distortion({{{0, 0}, {1, 1}}}, a, a) == 0.0);
  CHECK(distortion({{{0, 0}, {1, 1}}}, a, b) == doctest::Approx(0.2));
  CHECK(distortion(full_correspondence(2, 2), a, b) == doctest::Approx(1.2));
  CHECK_THROWS_AS(distortion({{{0, 0}, {2, 1}}}, a, b), InputError);
  CHECK_THROWS_AS(check_correspondence({{{0, 0}}}, 2, 2), InputError);
}

TEST_CASE("enumerate_correspondences counts") {
  // Relations with full projections: 7 for 2 x 2, 25 for 2 x 3.
  CHECK(enumerate_correspondences(2, 2).size() == 7);
  CHECK(enumerate_correspondences(2, 3).size() == 25);
  CHECK(enumerate_correspondences(1, 3).size() == 1);
}

TEST_CASE("gh_distance_exact against brute force") {
  const auto a = FiniteLengthSpace(mat({{0, 1}, {1, 0}}));
  const auto b = FiniteLengthSpace(mat({{0, 1.2}, {1.2, 0}}));
  CHECK(gh_distance_exact(a, a).distance == 0.0);
  CHECK(gh_distance_exact(a, b).distance == doctest::Approx(0.1));
  CHECK(gh_distance_exact(FiniteLengthSpace(mat({{0}})), a).distance == doctest::Approx(0.5));
  CHECK_THROWS_AS(gh_distance_exact(path_metric(6), path_metric(5)), SizeError);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t na = 1 + rng() % 4, nb = 1 + rng() % 4;
    const auto x = random_space(rng, na);
    const auto y = random_space(rng, nb);
    const GHResult r = gh_distance_exact(x, y);
    CHECK(r.distance == doctest::Approx(gh_brute(x, y)).epsilon(1e-12));
    CHECK(0.5 * distortion(r.witness, x, y) == doctest::Approx(r.distance).epsilon(1e-12));
    CHECK(gh_distance_exact(y, x).distance == doctest::Approx(r.distance).epsilon(1e-12));
  }
}

TEST_CASE("quadruple condition") {
  const auto t = tripod(1, 1.0);
  const auto v = quadruple_curvature_check(t, 0.0);
  CHECK_FALSE(v.pass);
  REQUIRE(v.worst);
  CHECK(v.worst->p == 0);
  CHECK(v.worst->angle_sum == doctest::Approx(3.0 * std::numbers::pi).epsilon(1e-12));

  CHECK(quadruple_curvature_check(path_metric(4, 3.0), 0.0).pass);
  CHECK(quadruple_curvature_check(path_metric(3), 0.0).pass);
  CHECK(quadruple_curvature_check(path_metric(3), 0.0).quadruples_checked == 0);

  // Monotone in k: pass at k' implies pass at every k <= k'.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_space(rng, 5);
    for (double k : {0.5, 0.0}) {
      if (quadruple_curvature_check(s, k).pass) {
        CHECK(quadruple_curvature_check(s, k - 1.0).pass);
      }
    }
  }
}
