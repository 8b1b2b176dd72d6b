#pragma once

// Constant-curvature model planes.
//
// Riemannian side: comparison angles in M^2(k) via the Euclidean, spherical or
// hyperbolic law of cosines.
//
// Lorentzian side: L^2(K). Points are stored in chart coordinates (t, x).
//   K = 0       Minkowski plane, metric -dt^2 + dx^2.
//   K = 1/r^2   de Sitter S^2_1(r) in R^3 with form (-,+,+):
//               X = (r sinh(t/r), r cosh(t/r) cos(x/r), r cosh(t/r) sin(x/r)),
//               metric -dt^2 + cosh^2(t/r) dx^2, chart |x| < pi r / 2.
//   K = -1/r^2  anti-de Sitter H^2_1(r) in R^3 with form (-,-,+):
//               X = (r cosh(x/r) cos(t/r), r cosh(x/r) sin(t/r), r sinh(x/r)),
//               metric -cosh^2(x/r) dt^2 + dx^2, pairs restricted to
//               |t_q - t_p| < pi r.
// Both curved charts tend to the Minkowski chart as r -> infinity.

#include <array>
#include <string>

namespace nullgeo {

// Angle at the vertex between sides b and c of the M^2(k) triangle with side
// lengths (a, b, c), a opposite the angle.
double comparison_angle(double k, double a, double b, double c);

struct ModelPoint {
  double t = 0.0;
  double x = 0.0;
};

using Embedding = std::array<double, 3>;

class LorentzianModelPlane {
 public:
  explicit LorentzianModelPlane(double curvature);

  double curvature() const { return curvature_; }
  // r = 1/sqrt(|K|); infinity for K = 0.
  double radius() const { return radius_; }

  // Time separation from p to q (0 unless q is in the chronological future
  // of p). Throws UnsupportedError outside the supported chart.
  double time_separation(const ModelPoint& p, const ModelPoint& q) const;

  // Point at parameter s in [0, 1] of the geodesic from p to q (affine in
  // time separation for timelike geodesics).
  ModelPoint geodesic_point(const ModelPoint& p, const ModelPoint& q, double s) const;

  Embedding embed(const ModelPoint& p) const;
  ModelPoint chart(const Embedding& e) const;
  // Bilinear form of the ambient R^3.
  double form(const Embedding& u, const Embedding& v) const;

  // Largest admissible side length (pi r; infinity for K = 0).
  double size_bound() const;

 private:
  void check_chart(const ModelPoint& p) const;

  double curvature_;
  double radius_;
};

double l2k_time_separation(double curvature, const ModelPoint& p, const ModelPoint& q);

enum class Side { XY, YZ, XZ };

std::string to_string(Side side);

struct ComparisonTriangle {
  double curvature = 0.0;
  ModelPoint x, y, z;
  double a = 0.0;  // rho'(x', y')
  double b = 0.0;  // rho'(y', z')
  double c = 0.0;  // rho'(x', z')

  double side_length(Side side) const;
};

// Comparison triangle with x' at the origin and z' on the t-axis. For K = 0,
// y' = ((c^2 + a^2 - b^2) / (2c), +sqrt(t^2 - a^2)).
ComparisonTriangle realize_timelike_triangle(double curvature, double a, double b, double c);

// Point on the given side at time separation s from the side's past vertex.
ModelPoint point_on_side(const ComparisonTriangle& triangle, Side side, double s);

}  // namespace nullgeo
