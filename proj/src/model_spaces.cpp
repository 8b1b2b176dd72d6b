#include "nullgeo/model_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nullgeo/error.hpp"

namespace nullgeo {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

bool near_equal(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)}); }

}  // namespace

double comparison_angle(double k, double a, double b, double c) {
  if (!std::isfinite(k) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw InputError("comparison angle needs finite inputs");
  }
  if (a < 0.0 || b < 0.0 || c < 0.0) throw ModelConstraintError("negative side length");
  if (b == 0.0 || c == 0.0) throw UndefinedAngleError("angle undefined at a vertex with a zero-length side");
  const double slack = 1e-12 * std::max({1.0, a, b, c});
  if (a > b + c + slack || b > a + c + slack || c > a + b + slack) {
    throw ModelConstraintError("side lengths violate the triangle inequality");
  }
  // Degenerate within the same band: acos near +-1 would turn rounding of the
  // sides into angle errors of order sqrt(1e-16).
  if (a >= b + c - slack) return kPi;
  if (a <= std::abs(b - c) + slack) return 0.0;
  double cosine = 0.0;
  if (k == 0.0) {
    cosine = (b * b + c * c - a * a) / (2.0 * b * c);
  } else if (k > 0.0) {
    const double s = std::sqrt(k);
    if (s * (a + b + c) >= 2.0 * kPi) throw ModelConstraintError("perimeter too large for the sphere of curvature k");
    const double denom = std::sin(s * b) * std::sin(s * c);
    if (denom <= 0.0) throw ModelConstraintError("side longer than half a great circle");
    cosine = (std::cos(s * a) - std::cos(s * b) * std::cos(s * c)) / denom;
  } else {
    const double s = std::sqrt(-k);
    cosine = (std::cosh(s * b) * std::cosh(s * c) - std::cosh(s * a)) / (std::sinh(s * b) * std::sinh(s * c));
  }
  return std::acos(clamp_unit(cosine));
}

LorentzianModelPlane::LorentzianModelPlane(double curvature)
    : curvature_(curvature),
      radius_(curvature == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(std::abs(curvature))) {
  if (!std::isfinite(curvature)) throw ParameterError("curvature must be finite");
}

double LorentzianModelPlane::size_bound() const { return kPi * radius_; }

void LorentzianModelPlane::check_chart(const ModelPoint& p) const {
  if (!std::isfinite(p.t) || !std::isfinite(p.x)) throw InputError("model point has non-finite coordinates");
  if (curvature_ > 0.0 && std::abs(p.x) >= 0.5 * kPi * radius_) {
    throw UnsupportedError("point outside the de Sitter chart |x| < pi r / 2");
  }
}

double LorentzianModelPlane::form(const Embedding& u, const Embedding& v) const {
  if (curvature_ > 0.0) return -u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  return -u[0] * v[0] - u[1] * v[1] + u[2] * v[2];
}

Embedding LorentzianModelPlane::embed(const ModelPoint& p) const {
  if (curvature_ == 0.0) return {p.t, p.x, 0.0};
  const double r = radius_;
  if (curvature_ > 0.0) {
    const double ch = r * std::cosh(p.t / r);
    return {r * std::sinh(p.t / r), ch * std::cos(p.x / r), ch * std::sin(p.x / r)};
  }
  const double ch = r * std::cosh(p.x / r);
  return {ch * std::cos(p.t / r), ch * std::sin(p.t / r), r * std::sinh(p.x / r)};
}

ModelPoint LorentzianModelPlane::chart(const Embedding& e) const {
  if (curvature_ == 0.0) return {e[0], e[1]};
  const double r = radius_;
  if (curvature_ > 0.0) return {r * std::asinh(e[0] / r), r * std::atan2(e[2], e[1])};
  return {r * std::atan2(e[1], e[0]), r * std::asinh(e[2] / r)};
}

double LorentzianModelPlane::time_separation(const ModelPoint& p, const ModelPoint& q) const {
  check_chart(p);
  check_chart(q);
  const double dt = q.t - p.t;
  if (curvature_ == 0.0) {
    const double dx = std::abs(q.x - p.x);
    if (dt <= dx) return 0.0;
    return std::sqrt((dt - dx) * (dt + dx));
  }
  const double r = radius_;
  if (curvature_ < 0.0 && std::abs(dt) >= kPi * r) {
    throw UnsupportedError("anti-de Sitter pair separated by pi r or more in time");
  }
  if (dt <= 0.0) return 0.0;
  const Embedding u = embed(p), v = embed(q);
  const Embedding delta{v[0] - u[0], v[1] - u[1], v[2] - u[2]};
  const double norm2 = form(delta, delta);
  if (norm2 >= 0.0) return 0.0;
  const double half = std::sqrt(-norm2) / (2.0 * r);
  if (curvature_ > 0.0) return 2.0 * r * std::asinh(half);
  return 2.0 * r * std::asin(std::min(1.0, half));
}

ModelPoint LorentzianModelPlane::geodesic_point(const ModelPoint& p, const ModelPoint& q, double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("geodesic parameter must lie in [0, 1]");
  if (curvature_ == 0.0) return {p.t + s * (q.t - p.t), p.x + s * (q.x - p.x)};
  if (s == 0.0 || (p.t == q.t && p.x == q.x)) return p;
  if (s == 1.0) return q;
  const double rho = time_separation(p, q);
  if (rho <= 0.0) throw UnsupportedError("geodesic interpolation needs timelike or coincident endpoints");
  const double theta = rho / radius_;
  double wp = 0.0, wq = 0.0;
  if (curvature_ > 0.0) {
    wp = std::sinh((1.0 - s) * theta) / std::sinh(theta);
    wq = std::sinh(s * theta) / std::sinh(theta);
  } else {
    wp = std::sin((1.0 - s) * theta) / std::sin(theta);
    wq = std::sin(s * theta) / std::sin(theta);
  }
  const Embedding u = embed(p), v = embed(q);
  return chart({wp * u[0] + wq * v[0], wp * u[1] + wq * v[1], wp * u[2] + wq * v[2]});
}

double l2k_time_separation(double curvature, const ModelPoint& p, const ModelPoint& q) {
  return LorentzianModelPlane(curvature).time_separation(p, q);
}

std::string to_string(Side side) {
  switch (side) {
    case Side::XY: return "xy";
    case Side::YZ: return "yz";
    case Side::XZ: return "xz";
  }
  return "?";
}

double ComparisonTriangle::side_length(Side side) const {
  switch (side) {
    case Side::XY: return a;
    case Side::YZ: return b;
    case Side::XZ: return c;
  }
  return 0.0;
}

ComparisonTriangle realize_timelike_triangle(double curvature, double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) throw InputError("side lengths must be finite");
  if (a < 0.0 || b < 0.0) throw ParameterError("side lengths a, b must be non-negative");
  if (!(c > 0.0)) throw ParameterError("side length c must be positive");
  if (c < a + b && !near_equal(c, a + b)) {
    throw ReverseTriangleError("c < a + b violates the reverse triangle inequality");
  }
  const LorentzianModelPlane plane(curvature);
  const double bound = plane.size_bound();
  if (a >= bound || b >= bound || c >= bound) {
    throw ModelConstraintError("side length exceeds the size bound pi/sqrt|K|");
  }
  ComparisonTriangle tri;
  tri.curvature = curvature;
  tri.a = a;
  tri.b = b;
  tri.c = c;
  tri.x = {0.0, 0.0};
  tri.z = {c, 0.0};
  if (curvature == 0.0) {
    const double t = (c * c + a * a - b * b) / (2.0 * c);
    tri.y = {t, std::sqrt(std::max(0.0, t * t - a * a))};
    return tri;
  }
  const double r = plane.radius();
  Embedding y{};
  if (curvature > 0.0) {
    y[1] = r * std::cosh(a / r);
    y[0] = (std::cosh(c / r) * y[1] - r * std::cosh(b / r)) / std::sinh(c / r);
    y[2] = std::sqrt(std::max(0.0, r * r + y[0] * y[0] - y[1] * y[1]));
  } else {
    y[0] = r * std::cos(a / r);
    y[1] = (r * std::cos(b / r) - std::cos(c / r) * y[0]) / std::sin(c / r);
    y[2] = std::sqrt(std::max(0.0, y[0] * y[0] + y[1] * y[1] - r * r));
  }
  tri.y = plane.chart(y);
  return tri;
}

ModelPoint point_on_side(const ComparisonTriangle& triangle, Side side, double s) {
  const double length = triangle.side_length(side);
  const double slack = 1e-12 * std::max(1.0, length);
  if (!(s >= -slack && s <= length + slack)) throw ParameterError("point parameter outside [0, side length]");
  s = std::clamp(s, 0.0, length);
  const ModelPoint* from = &triangle.x;
  const ModelPoint* to = &triangle.y;
  if (side == Side::YZ) {
    from = &triangle.y;
    to = &triangle.z;
  } else if (side == Side::XZ) {
    to = &triangle.z;
  }
  if (length == 0.0) return *from;
  return LorentzianModelPlane(triangle.curvature).geodesic_point(*from, *to, s / length);
}

}  // namespace nullgeo
