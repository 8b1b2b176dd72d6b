#pragma once

// Piecewise null curves in a generalized cone. The fiber component runs at
// unit speed along a track (a chain of fiber points), the time component
// solves alpha' = +-f(alpha) on each piece.

#include <cstddef>
#include <vector>

#include "nullgeo/cone.hpp"

namespace nullgeo {

struct NullSegment {
  double s_begin = 0.0;  // curve parameter
  double s_end = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  double u_begin = 0.0;  // arclength position along the track
  double u_end = 0.0;
  int direction = 0;     // +1 future directed, -1 past directed
};

struct PiecewiseNullCurve {
  std::vector<std::size_t> track;       // fiber points of the track
  std::vector<double> track_arclength;  // cumulative arclength at each track point
  std::vector<NullSegment> segments;
  double t_start = 0.0;
  double t_target = 0.0;
  double u_start = 0.0;
  double u_target = 0.0;

  double parameter_length() const { return segments.empty() ? 0.0 : segments.back().s_end; }
  // Sum of |t_end - t_begin| over the segments.
  double null_length() const;
};

struct NullCurveOptions {
  std::size_t max_splits = 60;
};

// Piecewise null curve from (t_p, x_p) to (t_q, x_q). Throws ConstructionError
// when a zigzag cannot be fitted into I after max_splits halvings.
PiecewiseNullCurve null_curve(const ConeGrid& grid, double t_p, std::size_t x_p, double t_q, std::size_t x_q,
                              const NullCurveOptions& options = {});

// alpha(s) on the curve.
double curve_time(const ConeGrid& grid, const PiecewiseNullCurve& curve, double s);

struct NullCurveCheck {
  double endpoint_t_error = 0.0;
  double endpoint_u_error = 0.0;
  double max_null_defect = 0.0;  // max | |alpha'| - f(alpha) | over samples
  double null_length = 0.0;
  double total_variation = 0.0;  // integral of |alpha'| by quadrature
  std::size_t samples = 0;
  bool pass = true;
};

NullCurveCheck check_null_curve(const ConeGrid& grid, const PiecewiseNullCurve& curve, std::size_t samples_per_segment = 16);

}  // namespace nullgeo
