#include "nullgeo/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "nullgeo/error.hpp"

namespace nullgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-12;

bool same_grid(const ConeGrid& a, const ConeGrid& b) {
  return a.n_t() == b.n_t() && a.interval() == b.interval() && a.fiber_size() == b.fiber_size() &&
         a.fiber().dist() == b.fiber().dist();
}

bool is_identity_warping(const WarpingFunction& f) {
  return f.kind() == WarpingKind::Constant && f.params()[0] == 1.0;
}

// Rows of two solvers, computed on demand and cached.
class RowCache {
 public:
  explicit RowCache(const NullDistanceSolver& solver) : solver_(solver) {}
  const std::vector<double>& operator()(std::size_t source) {
    auto it = rows_.find(source);
    if (it == rows_.end()) it = rows_.emplace(source, solver_.row(source)).first;
    return it->second;
  }

 private:
  const NullDistanceSolver& solver_;
  std::map<std::size_t, std::vector<double>> rows_;
};

}  // namespace

std::vector<std::size_t> sample_sources(std::size_t grid_size, std::size_t max_rows, std::uint64_t seed) {
  std::vector<std::size_t> out;
  if (grid_size <= max_rows) {
    out.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) out[i] = i;
    return out;
  }
  if (max_rows == 0) return out;
  std::mt19937_64 rng(seed);
  // One point per contiguous stratum of the index range.
  for (std::size_t k = 0; k < max_rows; ++k) {
    const std::size_t lo = grid_size * k / max_rows;
    const std::size_t hi = grid_size * (k + 1) / max_rows;
    out.push_back(lo + static_cast<std::size_t>(rng() % (hi - lo)));
  }
  return out;
}

ConvergenceReport null_convergence_check(const WarpingSequence& sequence, const FiniteLengthSpace& fiber,
                                         std::size_t n_t, const std::vector<std::size_t>& sources,
                                         double deviation_tol) {
  const WarpingFunction& f = sequence.limit;
  const double f_min = f.f_min();
  const NullDistanceSolver limit_solver(ConeGrid(f, fiber, n_t));
  std::vector<std::vector<double>> limit_rows;
  for (std::size_t s : sources) limit_rows.push_back(limit_solver.row(s));

  ConvergenceReport report;
  double previous = kInf;
  for (std::size_t j = 0; j < sequence.members.size(); ++j) {
    const WarpingFunction& fj = sequence.members[j];
    SandwichRow row;
    row.label = j < sequence.labels.size() ? sequence.labels[j] : "member " + std::to_string(j);
    if (!(fj.domain() == f.domain())) throw InputError("sequence member on a different interval");
    row.eps = sup_norm(f, fj);
    if (fj.f_min() < sequence.lower_bound) {
      row.excluded = true;
      row.diagnostic = "member falls below the lower bound c";
    } else if (!(row.eps < 0.25 * f_min)) {
      row.excluded = true;
      row.diagnostic = "eps_j >= f_min / 4";
    }
    if (row.excluded) {
      report.rows.push_back(row);
      continue;
    }
    const double eps = row.eps;
    const NullDistanceSolver solver(ConeGrid(fj, fiber, n_t));
    row.min_lower_margin = kInf;
    row.min_upper_margin = kInf;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto rj = solver.row(sources[k]);
      const auto& rf = limit_rows[k];
      for (std::size_t v = 0; v < rj.size(); ++v) {
        if (!std::isfinite(rf[v]) || !std::isfinite(rj[v])) continue;
        ++row.pairs;
        const double df = rf[v], dj = rj[v];
        const double lower = df - eps * (1.0 + 3.0 / f_min * df);
        const double upper = df + eps * (1.0 + 8.0 * eps / f_min + 8.0 / f_min * df);
        const double slack = kSlack * std::max(1.0, df);
        row.min_lower_margin = std::min(row.min_lower_margin, dj - lower);
        row.min_upper_margin = std::min(row.min_upper_margin, upper - dj);
        if (dj < lower - slack) ++row.lower_violations;
        if (dj > upper + slack) ++row.upper_violations;
        row.sup_deviation = std::max(row.sup_deviation, std::abs(dj - df));
      }
    }
    if (row.lower_violations + row.upper_violations > 0) report.sandwich_holds = false;
    if (row.sup_deviation > previous + deviation_tol) report.deviation_nonincreasing = false;
    previous = row.sup_deviation;
    report.rows.push_back(row);
  }
  return report;
}

FiniteLengthSpace product_space(const FiniteLengthSpace& fiber, const std::vector<double>& t_grid) {
  const std::size_t m = fiber.size();
  const std::size_t n = t_grid.size() * m;
  RealMatrix d(n, n);
  std::vector<std::string> ids(n);
  for (std::size_t a = 0; a < n; ++a) {
    ids[a] = std::to_string(a / m) + ":" + fiber.ids()[a % m];
    for (std::size_t b = 0; b < n; ++b) {
      d(a, b) = std::max(fiber.d(a % m, b % m), std::abs(t_grid[a / m] - t_grid[b / m]));
    }
  }
  return FiniteLengthSpace(std::move(ids), std::move(d));
}

LiftedCorrespondence lift_correspondence(const Correspondence& r, const ConeGrid& cone_n, const ConeGrid& cone) {
  if (!is_identity_warping(cone_n.warping()) || !is_identity_warping(cone.warping())) {
    throw UnsupportedError("correspondence lifting is defined for products (f = 1) only");
  }
  if (cone_n.n_t() != cone.n_t() || !(cone_n.interval() == cone.interval())) {
    throw InputError("lifting needs cones on the same t-grid");
  }
  const FiniteLengthSpace& xn = cone_n.fiber();
  const FiniteLengthSpace& x = cone.fiber();
  check_correspondence(r, xn.size(), x.size());
  LiftedCorrespondence out;
  out.base_distortion = distortion(r, xn, x);
  for (std::size_t level = 0; level < cone.levels(); ++level) {
    for (auto [i, j] : r.pairs) out.lifted.pairs.emplace_back(cone_n.index(level, i), cone.index(level, j));
  }
  double worst = 0.0;
  for (auto [u, v] : out.lifted.pairs) {
    const ConePoint pu = cone_n.point(u), pv = cone.point(v);
    for (auto [u2, v2] : out.lifted.pairs) {
      const ConePoint qu = cone_n.point(u2), qv = cone.point(v2);
      const double dt = std::abs(cone.t(pu.level) - cone.t(qu.level));
      const double a = std::max(xn.d(pu.fiber, qu.fiber), dt);
      const double b = std::max(x.d(pv.fiber, qv.fiber), dt);
      worst = std::max(worst, std::abs(a - b));
    }
  }
  out.lifted_distortion = worst;
  return out;
}

double isometry_eps(const NullDistanceSolver& solver_f, const NullDistanceSolver& solver_fn, double r, std::size_t p0) {
  if (!same_grid(solver_f.grid(), solver_fn.grid())) throw InputError("epsilon isometry needs cones on a shared grid");
  if (!(r > 0.0)) throw ParameterError("ball radius must be positive");
  RowCache rows_f(solver_f), rows_n(solver_fn);
  const auto df0 = rows_f(p0);
  const auto dn0 = rows_n(p0);
  const std::size_t n = df0.size();
  std::vector<std::size_t> ball, codomain;
  for (std::size_t p = 0; p < n; ++p) {
    if (df0[p] <= r) ball.push_back(p);
    if (dn0[p] <= r) codomain.push_back(p);
  }
  double eps = 0.0;
  double outside_min = kInf;
  for (std::size_t p = 0; p < n; ++p) {
    if (df0[p] > r) outside_min = std::min(outside_min, dn0[p]);
  }
  if (std::isfinite(outside_min)) eps = std::max(eps, 1.0 - outside_min / r + kSlack);
  std::vector<char> in_codomain(n, 0);
  for (std::size_t q : codomain) in_codomain[q] = 1;
  for (std::size_t p : ball) {
    eps = std::max(eps, dn0[p] / r - 1.0);
    const auto& rf = rows_f(p);
    const auto& rn = rows_n(p);
    for (std::size_t q : ball) eps = std::max(eps, std::abs(rf[q] - rn[q]));
    if (!in_codomain[p]) {
      double nearest = kInf;
      for (std::size_t q : codomain) nearest = std::min(nearest, rn[q]);
      eps = std::max(eps, nearest);
    }
  }
  return eps;
}

EpsilonIsometry epsilon_isometry(const NullDistanceSolver& solver_f, const NullDistanceSolver& solver_fn, double r,
                                 std::size_t p0, double eps) {
  if (!same_grid(solver_f.grid(), solver_fn.grid())) throw InputError("epsilon isometry needs cones on a shared grid");
  if (!(r > 0.0)) throw ParameterError("ball radius must be positive");
  if (!(eps >= 0.0)) throw ParameterError("eps must be non-negative");
  RowCache rows_f(solver_f), rows_n(solver_fn);
  const auto df0 = rows_f(p0);
  const auto dn0 = rows_n(p0);
  const std::size_t n = df0.size();
  EpsilonIsometry out;
  out.eps = eps;
  std::vector<char> in_codomain(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    if (df0[p] <= r) out.domain.push_back(p);
    if (dn0[p] <= r) {
      out.codomain.push_back(p);
      in_codomain[p] = 1;
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (dn0[p] <= (1.0 - eps) * r && df0[p] > r) {
      throw PreconditionError("inclusion D^{d_fn}_{(1-eps)r}(p0) in D^{d_f}_r(p0) fails at grid point " + std::to_string(p));
    }
  }
  for (std::size_t p : out.domain) {
    if (dn0[p] > (1.0 + eps) * r) {
      throw PreconditionError("inclusion D^{d_f}_r(p0) in D^{d_fn}_{(1+eps)r}(p0) fails at grid point " + std::to_string(p));
    }
  }
  for (std::size_t p : out.domain) {
    const auto& rf = rows_f(p);
    const auto& rn = rows_n(p);
    for (std::size_t q : out.domain) {
      if (std::abs(rf[q] - rn[q]) > eps) {
        throw PreconditionError("|d_f - d_fn| exceeds eps on the ball at (" + std::to_string(p) + "," + std::to_string(q) + ")");
      }
    }
  }
  for (std::size_t p : out.domain) {
    if (dn0[p] <= (1.0 - eps) * r || in_codomain[p]) {
      out.image.push_back(p);
      continue;
    }
    const auto& rn = rows_n(p);
    std::size_t best = n;
    for (std::size_t q : out.codomain) {
      if (best == n || rn[q] < rn[best]) best = q;
    }
    if (best == n || rn[best] > eps) {
      throw ConstructionError("no point of D^{d_fn}_r(p0) within eps of grid point " + std::to_string(p));
    }
    out.image.push_back(best);
    ++out.reassigned;
  }
  for (std::size_t a = 0; a < out.domain.size(); ++a) {
    const auto& rf = rows_f(out.domain[a]);
    const auto& rn = rows_n(out.image[a]);
    for (std::size_t b = 0; b < out.domain.size(); ++b) {
      out.max_distortion = std::max(out.max_distortion, std::abs(rf[out.domain[b]] - rn[out.image[b]]));
    }
  }
  std::vector<std::size_t> image_points = out.image;
  std::sort(image_points.begin(), image_points.end());
  image_points.erase(std::unique(image_points.begin(), image_points.end()), image_points.end());
  for (std::size_t q : out.codomain) {
    const auto& rq = rows_n(q);
    double nearest = kInf;
    for (std::size_t p : image_points) nearest = std::min(nearest, rq[p]);
    out.net_radius = std::max(out.net_radius, nearest);
  }
  out.gh_bound = 6.0 * eps;
  out.pass = out.max_distortion <= 3.0 * eps + kSlack && out.net_radius <= eps + kSlack;
  return out;
}

NetCertificate uniform_total_boundedness(const std::vector<WarpingFunction>& family,
                                         const std::vector<std::string>& labels, double bound_c,
                                         const FiniteLengthSpace& fiber, std::size_t n_t, double eps) {
  if (family.empty()) throw InputError("empty warping family");
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  if (!(bound_c > 0.0)) throw ParameterError("the bound C must be positive");
  const Interval iv = family.front().domain();
  for (const auto& f : family) {
    if (!(f.domain() == iv)) throw InputError("family members must share the interval");
  }
  NetCertificate out;
  out.mesh_bound = eps * std::max(1.0, bound_c);
  out.t_net = epsilon_net(path_metric(n_t + 1, iv.length()), eps).center_indices;
  out.fiber_net = epsilon_net(fiber, eps).center_indices;
  std::sort(out.t_net.begin(), out.t_net.end());
  std::sort(out.fiber_net.begin(), out.fiber_net.end());
  const std::size_t m = fiber.size();
  for (std::size_t level : out.t_net) {
    for (std::size_t j : out.fiber_net) out.net_points.push_back(level * m + j);
  }
  bool all_ok = true;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const std::string label = k < labels.size() ? labels[k] : "member " + std::to_string(k);
    if (family[k].f_max() > bound_c * (1.0 + kSlack)) {
      out.excluded.push_back(label + ": f_max = " + std::to_string(family[k].f_max()) + " exceeds C");
      continue;
    }
    const NullDistanceSolver solver(ConeGrid(family[k], fiber, n_t));
    std::vector<double> nearest(solver.grid().size(), kInf);
    for (std::size_t p : out.net_points) {
      const auto r = solver.row(p);
      for (std::size_t v = 0; v < r.size(); ++v) nearest[v] = std::min(nearest[v], r[v]);
    }
    const double achieved = *std::max_element(nearest.begin(), nearest.end());
    if (achieved <= out.mesh_bound * (1.0 + kSlack)) {
      out.certified.push_back(label);
      out.achieved.push_back(achieved);
    } else {
      all_ok = false;
      out.excluded.push_back(label + ": covering radius " + std::to_string(achieved) + " exceeds the mesh bound");
    }
  }
  out.pass = all_ok && !out.certified.empty();
  return out;
}

}  // namespace nullgeo
