#pragma once

// Random valid pre-length spaces from integer points of the Minkowski plane,
// plus instances with one deliberately broken axiom.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nullgeo/lpls.hpp"

namespace fixtures {

struct MinkowskiInstance {
  std::vector<std::pair<int, int>> points;  // (t, x)
  nullgeo::DiscretePreLengthSpace space;
  nullgeo::TimeFunction tau;
};

inline MinkowskiInstance minkowski_instance(const std::vector<std::pair<int, int>>& pts) {
  using namespace nullgeo;
  const std::size_t n = pts.size();
  RealMatrix d(n, n), rho(n, n);
  BoolMatrix causal(n, n, false), chrono(n, n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dt = pts[j].first - pts[i].first;
      const double dx = pts[j].second - pts[i].second;
      d(i, j) = std::hypot(dt, dx);
      causal(i, j) = dt >= std::abs(dx);
      chrono(i, j) = dt > std::abs(dx);
      rho(i, j) = chrono(i, j) ? std::sqrt(dt * dt - dx * dx) : 0.0;
    }
  }
  MinkowskiInstance out;
  out.points = pts;
  out.space = {FiniteLengthSpace(d), causal, chrono, rho};
  for (const auto& p : pts) out.tau.push_back(p.first);
  return out;
}

// Up to 7 distinct integer points with t in 0..6 and x in -2..2, plus the
// point (10, 0) in the causal future of all of them.
inline MinkowskiInstance random_minkowski(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t count = 1 + rng() % 7;
  std::set<std::pair<int, int>> chosen;
  while (chosen.size() < count) {
    chosen.emplace(static_cast<int>(rng() % 7), static_cast<int>(rng() % 5) - 2);
  }
  std::vector<std::pair<int, int>> pts(chosen.begin(), chosen.end());
  pts.emplace_back(10, 0);
  return minkowski_instance(pts);
}

struct BrokenInstance {
  std::string axiom;                     // expected issue code
  std::vector<std::size_t> witness;      // expected witness indices
  nullgeo::DiscretePreLengthSpace space;
};

// Chain a = (0,0) << b = (2,0) << c = (4,0) << top = (10,0), with a single
// axiom broken each time.
inline std::vector<BrokenInstance> broken_instances() {
  const auto base = minkowski_instance({{0, 0}, {2, 0}, {4, 0}, {10, 0}}).space;
  std::vector<BrokenInstance> out;
  auto add = [&](std::string axiom, std::vector<std::size_t> w, auto edit) {
    BrokenInstance b{std::move(axiom), std::move(w), base};
    edit(b.space);
    out.push_back(std::move(b));
  };
  add("reflexivity", {1}, [](auto& s) { s.causal(1, 1) = false; });
  add("rho-negative", {0, 1}, [](auto& s) { s.rho(0, 1) = -1.0; });
  add("chrono-causal", {2, 0}, [](auto& s) {
    s.chrono(2, 0) = true;
    s.rho(2, 0) = 1.0;
  });
  add("rho-chrono", {0, 1}, [](auto& s) { s.chrono(0, 1) = false; });
  add("causal-transitivity", {0, 1, 2}, [](auto& s) {
    s.causal(0, 2) = false;
    s.chrono(0, 2) = false;
    s.rho(0, 2) = 0.0;
  });
  add("reverse-triangle", {0, 1, 2}, [](auto& s) { s.rho(0, 2) = 3.0; });
  add("chrono-transitivity", {0, 1, 2}, [](auto& s) {
    s.chrono(0, 2) = false;
    s.rho(0, 2) = 0.0;
  });
  return out;
}

}  // namespace fixtures
