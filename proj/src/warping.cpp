#include "nullgeo/warping.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "nullgeo/error.hpp"

namespace nullgeo {

std::string to_string(WarpingKind kind) {
  switch (kind) {
    case WarpingKind::Constant: return "constant";
    case WarpingKind::Affine: return "affine";
    case WarpingKind::Exponential: return "exponential";
    case WarpingKind::Cosh: return "cosh";
    case WarpingKind::Tabulated: return "tabulated";
  }
  return "?";
}

WarpingFunction::WarpingFunction(WarpingKind kind, Interval domain, std::vector<double> params)
    : kind_(kind), domain_(domain), params_(std::move(params)) {
  if (!std::isfinite(domain_.a) || !std::isfinite(domain_.b) || !(domain_.a < domain_.b)) {
    throw ParameterError("warping domain must be a finite interval with a < b");
  }
  for (double p : params_) {
    if (!std::isfinite(p)) throw ParameterError("warping parameters must be finite");
  }
}

WarpingFunction WarpingFunction::constant(Interval domain, double value) {
  WarpingFunction f(WarpingKind::Constant, domain, {value});
  f.finish();
  return f;
}

WarpingFunction WarpingFunction::affine(Interval domain, double intercept, double slope) {
  WarpingFunction f(WarpingKind::Affine, domain, {intercept, slope});
  f.finish();
  return f;
}

WarpingFunction WarpingFunction::exponential(Interval domain, double scale, double rate) {
  WarpingFunction f(WarpingKind::Exponential, domain, {scale, rate});
  f.finish();
  return f;
}

WarpingFunction WarpingFunction::cosh(Interval domain, double scale, double rate, double center) {
  WarpingFunction f(WarpingKind::Cosh, domain, {scale, rate, center});
  f.finish();
  return f;
}

WarpingFunction WarpingFunction::tabulated(std::vector<double> t, std::vector<double> values) {
  if (t.size() < 2 || t.size() != values.size()) {
    throw ParameterError("tabulated warping needs at least two (t, f) samples of equal length");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ParameterError("tabulated t samples must be strictly increasing");
  }
  WarpingFunction f(WarpingKind::Tabulated, {t.front(), t.back()}, std::move(values));
  f.knots_ = std::move(t);
  f.finish();
  return f;
}

void WarpingFunction::finish() {
  const double a = domain_.a, b = domain_.b;
  switch (kind_) {
    case WarpingKind::Constant:
      f_min_ = f_max_ = params_[0];
      break;
    case WarpingKind::Affine:
    case WarpingKind::Exponential:
      f_min_ = std::min(value(a), value(b));
      f_max_ = std::max(value(a), value(b));
      break;
    case WarpingKind::Cosh: {
      f_min_ = std::min(value(a), value(b));
      f_max_ = std::max(value(a), value(b));
      const double center = params_[2];
      if (domain_.contains(center)) {
        f_min_ = std::min(f_min_, value(center));
        f_max_ = std::max(f_max_, value(center));
      }
      break;
    }
    case WarpingKind::Tabulated:
      f_min_ = *std::min_element(params_.begin(), params_.end());
      f_max_ = *std::max_element(params_.begin(), params_.end());
      break;
  }
  if (!(f_min_ > 0.0)) throw ParameterError(to_string(kind_) + " warping is not strictly positive on its domain");
  if (kind_ == WarpingKind::Tabulated) {
    cumulative_.assign(knots_.size(), 0.0);
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const double h = knots_[i] - knots_[i - 1];
      const double m = (params_[i] - params_[i - 1]) / h;
      const double piece = m == 0.0 ? h / params_[i - 1] : std::log1p(m * h / params_[i - 1]) / m;
      cumulative_[i] = cumulative_[i - 1] + piece;
    }
  }
}

void WarpingFunction::check_domain(double t) const {
  const double slack = 1e-12 * std::max({1.0, std::abs(domain_.a), std::abs(domain_.b)});
  if (!(t >= domain_.a - slack && t <= domain_.b + slack)) {
    throw InputError("t = " + std::to_string(t) + " lies outside the warping domain");
  }
}

std::size_t WarpingFunction::segment(double t) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
  return std::clamp<std::size_t>(hi, 1, knots_.size() - 1) - 1;
}

double WarpingFunction::value(double t) const {
  check_domain(t);
  switch (kind_) {
    case WarpingKind::Constant: return params_[0];
    case WarpingKind::Affine: return params_[0] + params_[1] * t;
    case WarpingKind::Exponential: return params_[0] * std::exp(params_[1] * t);
    case WarpingKind::Cosh: return params_[0] * std::cosh(params_[1] * (t - params_[2]));
    case WarpingKind::Tabulated: {
      const std::size_t k = segment(t);
      const double w = (t - knots_[k]) / (knots_[k + 1] - knots_[k]);
      return params_[k] + w * (params_[k + 1] - params_[k]);
    }
  }
  return 0.0;
}

double WarpingFunction::derivative(double t) const {
  check_domain(t);
  switch (kind_) {
    case WarpingKind::Constant: return 0.0;
    case WarpingKind::Affine: return params_[1];
    case WarpingKind::Exponential: return params_[1] * value(t);
    case WarpingKind::Cosh: return params_[0] * params_[1] * std::sinh(params_[1] * (t - params_[2]));
    case WarpingKind::Tabulated: {
      const std::size_t k = segment(t);
      return (params_[k + 1] - params_[k]) / (knots_[k + 1] - knots_[k]);
    }
  }
  return 0.0;
}

double WarpingFunction::second_derivative(double t) const {
  check_domain(t);
  switch (kind_) {
    case WarpingKind::Exponential:
    case WarpingKind::Cosh: return params_[1] * params_[1] * value(t);
    default: return 0.0;
  }
}

double WarpingFunction::G(double t) const {
  check_domain(t);
  t = std::clamp(t, domain_.a, domain_.b);
  const double a = domain_.a;
  switch (kind_) {
    case WarpingKind::Constant: return (t - a) / params_[0];
    case WarpingKind::Affine: {
      const double q = params_[1];
      if (q == 0.0) return (t - a) / params_[0];
      return std::log1p(q * (t - a) / value(a)) / q;
    }
    case WarpingKind::Exponential: {
      const double s = params_[0], r = params_[1];
      if (r == 0.0) return (t - a) / s;
      return -std::exp(-r * a) * std::expm1(-r * (t - a)) / (r * s);
    }
    case WarpingKind::Cosh: {
      const double s = params_[0], r = params_[1], c = params_[2];
      if (r == 0.0) return (t - a) / s;
      return (std::atan(std::sinh(r * (t - c))) - std::atan(std::sinh(r * (a - c)))) / (r * s);
    }
    case WarpingKind::Tabulated: {
      const std::size_t k = segment(t);
      const double m = (params_[k + 1] - params_[k]) / (knots_[k + 1] - knots_[k]);
      const double dt = t - knots_[k];
      const double piece = m == 0.0 ? dt / params_[k] : std::log1p(m * dt / params_[k]) / m;
      return cumulative_[k] + piece;
    }
  }
  return 0.0;
}

double WarpingFunction::G_inverse(double g) const {
  const double total = G(domain_.b);
  const double slack = 1e-12 * std::max(1.0, total);
  if (!(g >= -slack && g <= total + slack)) throw ParameterError("G value outside [0, G(b)]");
  if (g <= 0.0) return domain_.a;
  if (g >= total) return domain_.b;
  auto residual = [&](double t) { return G(t) - g; };
  // Bisect to adjacent doubles.
  auto done = [](double lo, double hi) { return std::nextafter(lo, hi) >= hi; };
  const auto bracket = boost::math::tools::bisect(residual, domain_.a, domain_.b, done);
  const double lo = bracket.first, hi = bracket.second;
  return std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
}

std::vector<double> WarpingFunction::sample_grid(std::size_t oversample) const {
  if (oversample == 0) throw ParameterError("oversample must be positive");
  const std::size_t n = oversample * kDefaultNt;
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    grid[i] = domain_.a + domain_.length() * static_cast<double>(i) / static_cast<double>(n);
  }
  grid.back() = domain_.b;
  grid.insert(grid.end(), knots_.begin(), knots_.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

double sup_norm(const WarpingFunction& f, const WarpingFunction& g, std::size_t oversample) {
  if (!(f.domain() == g.domain())) throw InputError("sup norm needs warping functions on the same interval");
  auto grid = f.sample_grid(oversample);
  const auto other = g.sample_grid(oversample);
  grid.insert(grid.end(), other.begin(), other.end());
  double worst = 0.0;
  for (double t : grid) worst = std::max(worst, std::abs(f.value(t) - g.value(t)));
  return worst;
}

}  // namespace nullgeo
