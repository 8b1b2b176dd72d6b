#include "nullgeo/null_curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nullgeo/error.hpp"

namespace nullgeo {

double PiecewiseNullCurve::null_length() const {
  double total = 0.0;
  for (const auto& seg : segments) total += std::abs(seg.t_end - seg.t_begin);
  return total;
}

namespace {

class Builder {
 public:
  Builder(const ConeGrid& grid, PiecewiseNullCurve& curve, double length, std::size_t max_splits)
      : f_(grid.warping()), curve_(curve), length_(length), max_splits_(max_splits), g_end_(f_.G(f_.domain().b)) {}

  // Future directed ascent through `amount` of G, bouncing along the track.
  void ascend(double& g, double& u, int& heading, double amount) {
    // Pieces below the rounding level of the bounce arithmetic are dropped.
    const double tiny = 1e-12 * std::max({1.0, amount, length_});
    double left = amount;
    while (left > tiny) {
      const double room = heading > 0 ? length_ - u : u;
      const double step = std::min(left, room);
      if (step > tiny) {
        push(g, g + step, u, u + heading * step, +1);
        g += step;
        u += heading * step;
        left -= step;
      } else {
        u = heading > 0 ? length_ : 0.0;
      }
      if (left > tiny) heading = -heading;
    }
  }

  // Moves along the track from u to target at the fixed level g by zigzags.
  void zigzag(double g, double& u, double target) {
    const int heading = target >= u ? 1 : -1;
    while (u != target) {
      double s1 = std::abs(target - u);
      std::size_t splits = 0;
      int dir = 0;
      while (true) {
        if (g + 0.5 * s1 <= g_end_) dir = 1;
        else if (g - 0.5 * s1 >= 0.0) dir = -1;
        if (dir != 0) break;
        if (++splits > max_splits_) throw ConstructionError("zigzag does not fit into the interval after repeated splits");
        s1 *= 0.5;
      }
      const double t0 = f_.G_inverse(g);
      // G moves at unit rate along null pieces, so the two halves meet at s1 / 2.
      const double s_bar = 0.5 * s1;
      auto alpha0 = [&](double s) { return f_.G_inverse(g + dir * s); };
      const double u_mid = u + heading * s_bar;
      const bool last = s1 == std::abs(target - u);
      const double u_next = last ? target : u + heading * s1;
      push_t(t0, alpha0(s_bar), u, u_mid, dir, s_bar);
      push_t(alpha0(s_bar), f_.G_inverse(g), u_mid, u_next, -dir, s1 - s_bar);
      u = u_next;
    }
  }

 private:
  void push(double g0, double g1, double u0, double u1, int dir) {
    push_t(f_.G_inverse(g0), f_.G_inverse(g1), u0, u1, dir, std::abs(g1 - g0));
  }

  void push_t(double t0, double t1, double u0, double u1, int dir, double ds) {
    NullSegment seg;
    seg.s_begin = curve_.segments.empty() ? 0.0 : curve_.segments.back().s_end;
    seg.s_end = seg.s_begin + ds;
    seg.t_begin = t0;
    seg.t_end = t1;
    seg.u_begin = u0;
    seg.u_end = u1;
    seg.direction = dir;
    curve_.segments.push_back(seg);
  }

  const WarpingFunction& f_;
  PiecewiseNullCurve& curve_;
  double length_;
  std::size_t max_splits_;
  double g_end_;
};

PiecewiseNullCurve forward_curve(const ConeGrid& grid, double t_p, std::size_t x_p, double t_q, std::size_t x_q,
                                 const NullCurveOptions& options) {
  const FiniteLengthSpace& fiber = grid.fiber();
  PiecewiseNullCurve curve;
  curve.t_start = t_p;
  curve.t_target = t_q;
  if (x_p == x_q && t_p == t_q) {
    curve.track = {x_p};
    curve.track_arclength = {0.0};
    return curve;
  }
  std::size_t end = x_q;
  if (x_p == x_q) {
    // A null curve cannot stand still in the fiber: detour to the nearest point and back.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < fiber.size(); ++k) {
      if (k != x_p && fiber.d(x_p, k) < best) {
        best = fiber.d(x_p, k);
        end = k;
      }
    }
    if (end == x_p) throw ConstructionError("a one-point fiber admits no null curves");
  }
  curve.track = fiber.geodesic_chain(x_p, end);
  curve.track_arclength.push_back(0.0);
  for (std::size_t k = 1; k < curve.track.size(); ++k) {
    curve.track_arclength.push_back(curve.track_arclength.back() + fiber.d(curve.track[k - 1], curve.track[k]));
  }
  const double length = curve.track_arclength.back();
  curve.u_start = 0.0;
  curve.u_target = x_p == x_q ? 0.0 : length;

  Builder builder(grid, curve, length, options.max_splits);
  const WarpingFunction& f = grid.warping();
  double g = f.G(t_p);
  double u = 0.0;
  int heading = 1;
  if (t_q > t_p) {
    const double g_q = f.G(t_q);
    builder.ascend(g, u, heading, g_q - g);
    g = g_q;
  }
  builder.zigzag(g, u, curve.u_target);
  return curve;
}

}  // namespace

PiecewiseNullCurve null_curve(const ConeGrid& grid, double t_p, std::size_t x_p, double t_q, std::size_t x_q,
                              const NullCurveOptions& options) {
  const Interval& iv = grid.interval();
  if (!iv.contains(t_p) || !iv.contains(t_q)) throw InputError("null curve endpoint outside the interval");
  if (x_p >= grid.fiber_size() || x_q >= grid.fiber_size()) throw InputError("fiber index out of range");
  if (t_p <= t_q) return forward_curve(grid, t_p, x_p, t_q, x_q, options);

  PiecewiseNullCurve back = forward_curve(grid, t_q, x_q, t_p, x_p, options);
  PiecewiseNullCurve curve;
  curve.track = back.track;
  curve.track_arclength = back.track_arclength;
  curve.t_start = t_p;
  curve.t_target = t_q;
  curve.u_start = back.u_target;
  curve.u_target = back.u_start;
  const double total = back.parameter_length();
  for (auto it = back.segments.rbegin(); it != back.segments.rend(); ++it) {
    NullSegment seg;
    seg.s_begin = total - it->s_end;
    seg.s_end = total - it->s_begin;
    seg.t_begin = it->t_end;
    seg.t_end = it->t_begin;
    seg.u_begin = it->u_end;
    seg.u_end = it->u_begin;
    seg.direction = -it->direction;
    curve.segments.push_back(seg);
  }
  return curve;
}

namespace {

double segment_time(const WarpingFunction& f, const NullSegment& seg, double s) {
  const double g0 = f.G(seg.t_begin);
  const double g = g0 + seg.direction * (std::clamp(s, seg.s_begin, seg.s_end) - seg.s_begin);
  return f.G_inverse(std::clamp(g, 0.0, f.G(f.domain().b)));
}

}  // namespace

double curve_time(const ConeGrid& grid, const PiecewiseNullCurve& curve, double s) {
  if (curve.segments.empty()) return curve.t_start;
  if (!(s >= 0.0 && s <= curve.parameter_length())) throw ParameterError("curve parameter out of range");
  auto it = std::lower_bound(curve.segments.begin(), curve.segments.end(), s,
                             [](const NullSegment& seg, double v) { return seg.s_end < v; });
  if (it == curve.segments.end()) --it;
  return segment_time(grid.warping(), *it, s);
}

NullCurveCheck check_null_curve(const ConeGrid& grid, const PiecewiseNullCurve& curve, std::size_t samples_per_segment) {
  const WarpingFunction& f = grid.warping();
  NullCurveCheck out;
  out.null_length = curve.null_length();
  if (curve.segments.empty()) {
    out.endpoint_t_error = std::abs(curve.t_start - curve.t_target);
    out.pass = out.endpoint_t_error <= 1e-6;
    return out;
  }
  out.endpoint_t_error = std::abs(curve.segments.back().t_end - curve.t_target);
  out.endpoint_u_error = std::abs(curve.segments.back().u_end - curve.u_target);
  for (const auto& seg : curve.segments) {
    const double len = seg.s_end - seg.s_begin;
    if (!(len > 0.0)) continue;
    const double h = std::min(1e-4, 0.25 * len / static_cast<double>(samples_per_segment + 1));
    for (std::size_t k = 1; k <= samples_per_segment; ++k) {
      const double s = seg.s_begin + len * static_cast<double>(k) / static_cast<double>(samples_per_segment + 1);
      const double slope = (segment_time(f, seg, s + h) - segment_time(f, seg, s - h)) / (2.0 * h);
      out.max_null_defect = std::max(out.max_null_defect, std::abs(std::abs(slope) - f.value(segment_time(f, seg, s))));
      ++out.samples;
    }
    auto speed = [&](double s) { return f.value(segment_time(f, seg, s)); };
    out.total_variation += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(speed, seg.s_begin, seg.s_end, 8, 1e-11);
  }
  out.pass = out.endpoint_t_error <= 1e-6 && out.endpoint_u_error == 0.0 && out.max_null_defect <= 1e-6 &&
             std::abs(out.null_length - out.total_variation) <= 1e-9;
  return out;
}

}  // namespace nullgeo
