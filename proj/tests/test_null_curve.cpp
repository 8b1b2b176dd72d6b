#include <doctest.h>

#include <cmath>

#include "nullgeo/error.hpp"
#include "nullgeo/null_curve.hpp"

using namespace nullgeo;

namespace {

void check_continuity(const PiecewiseNullCurve& c) {
  REQUIRE_FALSE(c.segments.empty());
  CHECK(c.segments.front().s_begin == 0.0);
  CHECK(c.segments.front().u_begin == doctest::Approx(c.u_start));
  CHECK(c.segments.front().t_begin == doctest::Approx(c.t_start).epsilon(1e-12));
  for (std::size_t k = 1; k < c.segments.size(); ++k) {
    const auto& a = c.segments[k - 1];
    const auto& b = c.segments[k];
    CHECK(a.s_end == b.s_begin);
    CHECK(a.u_end == doctest::Approx(b.u_begin).epsilon(1e-14));
    CHECK(a.t_end == doctest::Approx(b.t_begin).epsilon(1e-12));
  }
  // Unit fiber speed: parameter length of each piece equals its fiber travel.
  for (const auto& s : c.segments) CHECK(s.s_end - s.s_begin == doctest::Approx(std::abs(s.u_end - s.u_begin)).epsilon(1e-12));
}

// |alpha'| = f(alpha) by central differences of curve_time.
double null_defect(const ConeGrid& g, const PiecewiseNullCurve& c) {
  double worst = 0.0;
  for (const auto& seg : c.segments) {
    const double len = seg.s_end - seg.s_begin;
    if (len < 1e-6) continue;
    for (int k = 1; k < 8; ++k) {
      const double s = seg.s_begin + len * k / 8.0, h = 1e-6 * len;
      const double slope = (curve_time(g, c, s + h) - curve_time(g, c, s - h)) / (2 * h);
      worst = std::max(worst, std::abs(std::abs(slope) - g.warping().value(curve_time(g, c, s))));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("null curve between causally related points") {
  const ConeGrid g(WarpingFunction::constant({0, 1}, 1.0), path_metric(5), 4);
  const auto c = null_curve(g, 0.0, 0, 1.0, 4);
  check_continuity(c);
  CHECK(c.null_length() == doctest::Approx(1.0));
  CHECK(check_null_curve(g, c).pass);
  CHECK(null_defect(g, c) < 1e-5);
}

TEST_CASE("null curve at equal times zigzags") {
  const ConeGrid g(WarpingFunction::affine({0, 1}, 1.0, 1.0), path_metric(5), 4);
  const auto c = null_curve(g, 0.5, 0, 0.5, 4);
  check_continuity(c);
  CHECK(c.segments.back().t_end == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(c.segments.back().u_end == c.u_target);
  const auto chk = check_null_curve(g, c);
  CHECK(chk.pass);
  CHECK(chk.null_length == doctest::Approx(chk.total_variation).epsilon(1e-9));
  CHECK(null_defect(g, c) < 1e-5);
  // Future and past pieces alternate.
  for (std::size_t k = 1; k < c.segments.size(); ++k) CHECK(c.segments[k].direction == -c.segments[k - 1].direction);
}

TEST_CASE("past directed and stationary endpoints") {
  const ConeGrid g(WarpingFunction::cosh({0, 1}, 1.0, 1.0, 0.5), tripod(2, 0.5), 4);
  const auto back = null_curve(g, 1.0, 1, 0.0, 4);
  check_continuity(back);
  CHECK(back.segments.front().direction == -1);
  CHECK(check_null_curve(g, back).pass);

  const auto loop = null_curve(g, 0.25, 2, 0.75, 2);
  check_continuity(loop);
  CHECK(loop.u_target == 0.0);
  CHECK(check_null_curve(g, loop).pass);

  const auto still = null_curve(g, 0.5, 3, 0.5, 3);
  CHECK(still.segments.empty());
  CHECK(still.null_length() == 0.0);
  CHECK(curve_time(g, still, 0.0) == 0.5);
}

TEST_CASE("null curve errors") {
  const ConeGrid g(WarpingFunction::constant({0, 1}, 1.0), path_metric(3), 2);
  CHECK_THROWS_AS(null_curve(g, 0.0, 0, 2.0, 1), InputError);
  CHECK_THROWS_AS(null_curve(g, 0.0, 0, 1.0, 5), InputError);
  const ConeGrid lone(WarpingFunction::constant({0, 1}, 1.0), FiniteLengthSpace(RealMatrix(1, 1, 0.0)), 2);
  CHECK_THROWS_AS(null_curve(lone, 0.0, 0, 1.0, 0), ConstructionError);
  // A long fiber cannot be crossed at fixed time on a short interval without splitting.
  const ConeGrid wide(WarpingFunction::constant({0, 0.1}, 1.0), path_metric(3, 10.0), 2);
  const auto c = null_curve(wide, 0.05, 0, 0.05, 2);
  CHECK(check_null_curve(wide, c).pass);
  CHECK(c.segments.size() > 2);
  const auto first = null_curve(g, 0.0, 0, 1.0, 2);
  CHECK_THROWS_AS(curve_time(g, first, first.parameter_length() + 1.0), ParameterError);
  CHECK_THROWS_AS(null_curve(wide, 0.05, 0, 0.05, 2, {.max_splits = 2}), ConstructionError);
}
