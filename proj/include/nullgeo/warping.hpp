#pragma once

// Positive warping functions on a compact interval, with the reciprocal
// antiderivative G(t) = int_a^t ds / f(s) and its inverse.

#include <string>
#include <vector>

namespace nullgeo {

inline constexpr std::size_t kDefaultNt = 200;

struct Interval {
  double a = 0.0;
  double b = 1.0;

  double length() const { return b - a; }
  bool contains(double t) const { return t >= a && t <= b; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class WarpingKind { Constant, Affine, Exponential, Cosh, Tabulated };

std::string to_string(WarpingKind kind);

class WarpingFunction {
 public:
  // f = value
  static WarpingFunction constant(Interval domain, double value);
  // f(t) = intercept + slope * t
  static WarpingFunction affine(Interval domain, double intercept, double slope);
  // f(t) = scale * exp(rate * t)
  static WarpingFunction exponential(Interval domain, double scale, double rate);
  // f(t) = scale * cosh(rate * (t - center))
  static WarpingFunction cosh(Interval domain, double scale, double rate, double center);
  // Piecewise linear through (t_i, f_i); the domain is [t_0, t_n].
  static WarpingFunction tabulated(std::vector<double> t, std::vector<double> f);

  WarpingKind kind() const { return kind_; }
  const Interval& domain() const { return domain_; }
  // Closed-form parameters in the order of the factory arguments; for
  // tabulated functions the knot values.
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& knots() const { return knots_; }

  double value(double t) const;
  double derivative(double t) const;
  // Zero for tabulated functions (piecewise linear); use second differences.
  double second_derivative(double t) const;
  bool twice_differentiable() const { return kind_ != WarpingKind::Tabulated; }

  double G(double t) const;
  // Inverse of G by bisection; g must lie in [0, G(b)].
  double G_inverse(double g) const;

  double f_min() const { return f_min_; }
  double f_max() const { return f_max_; }

  // Uniform oversampled evaluation grid (plus tabulated knots), sorted.
  std::vector<double> sample_grid(std::size_t oversample = 10) const;

 private:
  WarpingFunction(WarpingKind kind, Interval domain, std::vector<double> params);
  void finish();
  void check_domain(double t) const;
  std::size_t segment(double t) const;

  WarpingKind kind_ = WarpingKind::Constant;
  Interval domain_;
  std::vector<double> params_;
  std::vector<double> knots_;
  std::vector<double> cumulative_;  // G at the tabulated knots
  double f_min_ = 0.0;
  double f_max_ = 0.0;
};

// max |f - g| on the shared oversampled grid.
double sup_norm(const WarpingFunction& f, const WarpingFunction& g, std::size_t oversample = 10);

}  // namespace nullgeo
