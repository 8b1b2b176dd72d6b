#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "nullgeo/error.hpp"
#include "nullgeo/model_spaces.hpp"

using namespace nullgeo;

namespace {

constexpr double kPi = std::numbers::pi;

using Vec = std::array<double, 6>;  // position and velocity in R^3

// Geodesic equation of the hyperquadric <X, X> = r^2 (de Sitter, form -,+,+)
// for a unit-speed timelike curve: X'' = X / r^2. Integrated with RK4.
Vec rk4_de_sitter(Vec y, double length, int steps, double r) {
  auto rhs = [r](const Vec& v) {
    return Vec{v[3], v[4], v[5], v[0] / (r * r), v[1] / (r * r), v[2] / (r * r)};
  };
  const double h = length / steps;
  for (int k = 0; k < steps; ++k) {
    const Vec k1 = rhs(y);
    Vec tmp;
    for (int i = 0; i < 6; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    const Vec k2 = rhs(tmp);
    for (int i = 0; i < 6; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    const Vec k3 = rhs(tmp);
    for (int i = 0; i < 6; ++i) tmp[i] = y[i] + h * k3[i];
    const Vec k4 = rhs(tmp);
    for (int i = 0; i < 6; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return y;
}

double minkowski(double dt, double dx) { return dt > std::abs(dx) ? std::sqrt(dt * dt - dx * dx) : 0.0; }

}  // namespace

TEST_CASE("comparison_angle") {
  CHECK(comparison_angle(0.0, 1, 1, 1) == doctest::Approx(kPi / 3).epsilon(1e-14));
  CHECK(comparison_angle(0.0, 2, 1, 1) == doctest::Approx(kPi).epsilon(1e-14));
  // Frozen high-precision values of the hyperbolic and spherical laws of cosines.
  CHECK(comparison_angle(-1.0, 1, 1, 1) == doctest::Approx(0.918797872178027369).epsilon(1e-13));
  CHECK(comparison_angle(1.0, 1, 1, 1) == doctest::Approx(1.212395849774585996).epsilon(1e-13));
  CHECK_THROWS_AS(comparison_angle(0.0, 1, 0, 1), UndefinedAngleError);
  CHECK_THROWS_AS(comparison_angle(0.0, 3, 1, 1), ModelConstraintError);
  CHECK_THROWS_AS(comparison_angle(1.0, 2, 2, 2.5), ModelConstraintError);
  for (double k : {1e-6, -1e-6}) {
    CHECK(std::abs(comparison_angle(k, 1.3, 1.0, 0.7) - comparison_angle(0.0, 1.3, 1.0, 0.7)) < 1e-6);
  }
}

TEST_CASE("Minkowski time separation") {
  CHECK(l2k_time_separation(0.0, {0, 0}, {2, 1}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(l2k_time_separation(0.0, {0, 0}, {1, 2}) == 0.0);
  CHECK(l2k_time_separation(0.0, {2, 1}, {0, 0}) == 0.0);
  CHECK(l2k_time_separation(0.0, {0, 0}, {1, 1}) == 0.0);
}

TEST_CASE("de Sitter against geodesic integration") {
  for (double r : {1.0, 2.0}) {
    const LorentzianModelPlane plane(1.0 / (r * r));
    // Start at chart point (0.2, 0.3) with a unit timelike velocity tangent to the quadric.
    const ModelPoint p{0.2, 0.3};
    const Embedding x0 = plane.embed(p);
    // Tangent vectors: d/dt and d/dx of the embedding.
    const double ct = std::cosh(p.t / r), st = std::sinh(p.t / r);
    const Embedding et{ct, st * std::cos(p.x / r), st * std::sin(p.x / r)};
    const Embedding ex{0.0, -ct * std::sin(p.x / r), ct * std::cos(p.x / r)};
    // v = alpha e_t + beta e_x with -alpha^2 + beta^2 cosh^2 = -1.
    const double beta = 0.4;
    const double alpha = std::sqrt(1.0 + beta * beta * ct * ct);
    Vec y{x0[0], x0[1], x0[2], 0, 0, 0};
    for (int i = 0; i < 3; ++i) y[3 + i] = alpha * et[i] + beta * ex[i];
    CHECK(plane.form({y[3], y[4], y[5]}, {y[3], y[4], y[5]}) == doctest::Approx(-1.0).epsilon(1e-12));
    const Vec end = rk4_de_sitter(y, 1.0, 4000, r);
    const ModelPoint q = plane.chart({end[0], end[1], end[2]});
    CHECK(plane.time_separation(p, q) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(plane.time_separation(q, p) == 0.0);
  }
}

TEST_CASE("embedding and chart are inverse") {
  for (double k : {1.0, -1.0, 0.25, -4.0}) {
    const LorentzianModelPlane plane(k);
    for (ModelPoint p : {ModelPoint{0.1, 0.2}, ModelPoint{-0.3, 0.4}, ModelPoint{0.5, -0.1}}) {
      const Embedding e = plane.embed(p);
      const double r = plane.radius();
      CHECK(plane.form(e, e) == doctest::Approx(k > 0 ? r * r : -r * r).epsilon(1e-12));
      const ModelPoint back = plane.chart(e);
      CHECK(back.t == doctest::Approx(p.t).epsilon(1e-12));
      CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
    }
  }
}

TEST_CASE("small curvature tends to Minkowski") {
  const ModelPoint p{0.1, 0.2}, q{1.3, 0.5};
  const double flat = minkowski(q.t - p.t, q.x - p.x);
  CHECK(std::abs(l2k_time_separation(1e-6, p, q) - flat) < 1e-6);
  CHECK(std::abs(l2k_time_separation(-1e-6, p, q) - flat) < 1e-6);
}

TEST_CASE("anti-de Sitter regime") {
  const LorentzianModelPlane plane(-1.0);
  CHECK_THROWS_AS(plane.time_separation({0, 0}, {4.0, 0}), UnsupportedError);
  // Static observer x = 0 is a geodesic with proper time t.
  CHECK(plane.time_separation({0, 0}, {1.0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(LorentzianModelPlane(1.0).time_separation({0, 2.0}, {1, 0}), UnsupportedError);
}

TEST_CASE("realize_timelike_triangle at K = 0") {
  const auto t = realize_timelike_triangle(0.0, 1, 1, 2.5);
  CHECK(t.y.t == doctest::Approx(1.25));
  CHECK(t.y.x == doctest::Approx(0.75));
  const auto col = realize_timelike_triangle(0.0, 1, 1, 2);
  CHECK(col.y.t == doctest::Approx(1.0));
  CHECK(col.y.x == doctest::Approx(0.0));
  // a = b = 0: y' sits on both past and future light cones, halfway up.
  const auto deg = realize_timelike_triangle(0.0, 0, 0, 1);
  CHECK(deg.y.t == doctest::Approx(0.5));
  CHECK(deg.y.x == doctest::Approx(0.5));
  CHECK(l2k_time_separation(0.0, deg.x, deg.y) == 0.0);
  CHECK(l2k_time_separation(0.0, deg.y, deg.z) == 0.0);
  CHECK_THROWS_AS(realize_timelike_triangle(0.0, 1, 1, 1.5), ReverseTriangleError);
  CHECK_THROWS_AS(realize_timelike_triangle(-1.0, 1, 1, 3.5), ModelConstraintError);
}

TEST_CASE("realized sides reproduce the inputs") {
  const double sides[][3] = {{1, 1, 2.5}, {0.3, 0.4, 0.9}, {0.2, 0.7, 1.0}, {0.5, 0.5, 1.0}};
  for (double k : {0.0, 1.0, -1.0, 0.3}) {
    for (const auto& s : sides) {
      const auto t = realize_timelike_triangle(k, s[0], s[1], s[2]);
      CHECK(l2k_time_separation(k, t.x, t.y) == doctest::Approx(s[0]).epsilon(1e-10));
      CHECK(l2k_time_separation(k, t.y, t.z) == doctest::Approx(s[1]).epsilon(1e-10));
      CHECK(l2k_time_separation(k, t.x, t.z) == doctest::Approx(s[2]).epsilon(1e-10));
    }
  }
}

TEST_CASE("point_on_side") {
  const auto t = realize_timelike_triangle(0.0, 1, 1, 2.5);
  const auto m = point_on_side(t, Side::XZ, 1.25);
  CHECK(m.t == doctest::Approx(1.25));
  CHECK(m.x == doctest::Approx(0.0));
  const auto v = point_on_side(t, Side::XY, 0.0);
  CHECK(v.t == 0.0);
  CHECK(v.x == 0.0);
  const auto h = point_on_side(t, Side::XY, 0.5);
  CHECK(h.t == doctest::Approx(0.625));
  CHECK(h.x == doctest::Approx(0.375));
  CHECK(l2k_time_separation(0.0, t.x, h) == doctest::Approx(0.5));
  CHECK_THROWS_AS(point_on_side(t, Side::XY, 1.5), ParameterError);

  // Additivity along sides in curved planes.
  for (double k : {1.0, -1.0}) {
    const auto c = realize_timelike_triangle(k, 0.4, 0.5, 1.2);
    for (Side side : {Side::XY, Side::YZ, Side::XZ}) {
      const double len = c.side_length(side);
      const ModelPoint mid = point_on_side(c, side, 0.3 * len);
      const ModelPoint from = side == Side::YZ ? c.y : c.x;
      const ModelPoint to = side == Side::XY ? c.y : c.z;
      CHECK(l2k_time_separation(k, from, mid) + l2k_time_separation(k, mid, to) ==
            doctest::Approx(l2k_time_separation(k, from, to)).epsilon(1e-8));
      CHECK(l2k_time_separation(k, from, mid) == doctest::Approx(0.3 * len).epsilon(1e-8));
    }
  }
}
