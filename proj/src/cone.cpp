#include "nullgeo/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "nullgeo/error.hpp"

namespace nullgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

bool near(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

// Fiber points ordered by distance from each point (index order on ties).
std::vector<std::vector<std::uint32_t>> distance_order(const FiniteLengthSpace& fiber) {
  const std::size_t m = fiber.size();
  std::vector<std::vector<std::uint32_t>> order(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto& o = order[j];
    o.resize(m);
    for (std::size_t k = 0; k < m; ++k) o[k] = static_cast<std::uint32_t>(k);
    std::stable_sort(o.begin(), o.end(), [&](std::uint32_t x, std::uint32_t y) { return fiber.d(j, x) < fiber.d(j, y); });
  }
  return order;
}

}  // namespace

std::string to_string(CausalKind kind) {
  switch (kind) {
    case CausalKind::None: return "none";
    case CausalKind::Causal: return "causal";
    case CausalKind::Chronological: return "chronological";
  }
  return "?";
}

CausalKind classify(double delta_g, double d) {
  const double band = 1e-12 * std::max({1.0, std::abs(delta_g), d});
  if (delta_g < -band) return CausalKind::None;
  if (d < delta_g - band) return CausalKind::Chronological;
  if (d <= delta_g + band) return CausalKind::Causal;
  return CausalKind::None;
}

ConeGrid::ConeGrid(WarpingFunction warping, FiniteLengthSpace fiber, std::size_t n_t)
    : warping_(std::move(warping)), fiber_(std::move(fiber)), n_t_(n_t) {
  if (n_t_ == 0) throw ParameterError("n_t must be positive");
  if (fiber_.size() == 0) throw InputError("fiber has no points");
  if (levels() * fiber_.size() >= kUnreached) throw SizeError("cone grid too large");
  const Interval& iv = warping_.domain();
  dt_ = iv.length() / static_cast<double>(n_t_);
  t_.resize(levels());
  g_.resize(levels());
  for (std::size_t i = 0; i <= n_t_; ++i) {
    t_[i] = i == n_t_ ? iv.b : iv.a + dt_ * static_cast<double>(i);
    g_[i] = warping_.G(t_[i]);
  }
}

std::size_t ConeGrid::level_of(double t) const {
  const Interval& iv = interval();
  if (!(t >= iv.a - 1e-12 && t <= iv.b + 1e-12)) throw InputError("t lies outside the cone interval");
  const double x = (t - iv.a) / dt_;
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9) throw InputError("t is not a grid level");
  return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n_t_)));
}

CausalKind ConeGrid::relation(std::size_t u, std::size_t v) const {
  const ConePoint p = point(u), q = point(v);
  if (q.level < p.level) return CausalKind::None;
  if (u == v) return CausalKind::Causal;
  if (q.level == p.level) return CausalKind::None;
  return classify(g_[q.level] - g_[p.level], fiber_.d(p.fiber, q.fiber));
}

bool ConeGrid::related(std::size_t u, std::size_t v) const {
  return relation(u, v) != CausalKind::None || relation(v, u) != CausalKind::None;
}

double ConeGrid::product_distance(std::size_t u, std::size_t v) const {
  const ConePoint p = point(u), q = point(v);
  return std::abs(t_[p.level] - t_[q.level]) + fiber_.d(p.fiber, q.fiber);
}

CausalKind causal_relation(const ConeGrid& grid, double t_p, std::size_t x_p, double t_q, std::size_t x_q) {
  const Interval& iv = grid.interval();
  if (!iv.contains(t_p) || !iv.contains(t_q)) throw InputError("cone point time outside the interval");
  if (x_p >= grid.fiber_size() || x_q >= grid.fiber_size()) throw InputError("fiber index out of range");
  if (t_q < t_p) return CausalKind::None;
  if (t_q == t_p) return x_p == x_q ? CausalKind::Causal : CausalKind::None;
  const WarpingFunction& f = grid.warping();
  return classify(f.G(t_q) - f.G(t_p), grid.fiber().d(x_p, x_q));
}

NullDistanceSolver::NullDistanceSolver(ConeGrid grid) : grid_(std::move(grid)) {
  const std::size_t m = grid_.fiber_size();
  const std::size_t n_t = grid_.n_t();
  const FiniteLengthSpace& fiber = grid_.fiber();
  const auto order = distance_order(fiber);
  const double g_end = grid_.G_level(n_t);

  // For every point, the first level at which each fiber point becomes
  // causally reachable; keep only the candidates not reachable through an
  // earlier candidate.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> forward(grid_.size());
  std::vector<std::size_t> first(m);
  constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < n_t; ++i) {
    const double gi = grid_.G_level(i);
    for (std::size_t j = 0; j < m; ++j) {
      std::fill(first.begin(), first.end(), kNever);
      const auto& oj = order[j];
      std::size_t reach = 0;
      for (; reach < m; ++reach) {
        const std::size_t k = oj[reach];
        const double d = fiber.d(j, k);
        if (k == j) {
          first[k] = i + 1;
          continue;
        }
        if (classify(g_end - gi, d) == CausalKind::None) break;
        std::size_t lo = i + 1, hi = n_t;
        while (lo < hi) {
          const std::size_t mid = (lo + hi) / 2;
          if (classify(grid_.G_level(mid) - gi, d) != CausalKind::None) hi = mid;
          else lo = mid + 1;
        }
        first[k] = lo;
      }
      auto& out = forward[grid_.index(i, j)];
      for (std::size_t r = 0; r < reach; ++r) {
        const std::size_t k = oj[r];
        const std::size_t lk = first[k];
        bool redundant = false;
        if (k != j) {
          const double dk = fiber.d(j, k);
          for (std::size_t s = 0; s < reach && !redundant; ++s) {
            const std::size_t l = oj[s];
            if (fiber.d(j, l) >= dk) break;
            if (l == k || first[l] >= lk) continue;
            redundant = classify(grid_.G_level(lk) - grid_.G_level(first[l]), fiber.d(l, k)) != CausalKind::None;
          }
        }
        if (!redundant) {
          out.emplace_back(static_cast<std::uint32_t>(grid_.index(lk, k)), static_cast<std::uint32_t>(lk - i));
        }
      }
    }
  }

  std::vector<std::size_t> degree(grid_.size(), 0);
  for (std::size_t u = 0; u < forward.size(); ++u) {
    for (auto [v, span] : forward[u]) {
      ++degree[u];
      ++degree[v];
      max_span_ = std::max(max_span_, span);
    }
  }
  offsets_.assign(grid_.size() + 1, 0);
  for (std::size_t u = 0; u < grid_.size(); ++u) offsets_[u + 1] = offsets_[u] + degree[u];
  targets_.resize(offsets_.back());
  spans_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t u = 0; u < forward.size(); ++u) {
    for (auto [v, span] : forward[u]) {
      targets_[fill[u]] = v;
      spans_[fill[u]++] = span;
      targets_[fill[v]] = static_cast<std::uint32_t>(u);
      spans_[fill[v]++] = span;
    }
  }
  // Neighbour lists in index order keep path extraction deterministic.
  for (std::size_t u = 0; u < grid_.size(); ++u) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> adj;
    for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) adj.emplace_back(targets_[e], spans_[e]);
    std::sort(adj.begin(), adj.end());
    for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
      targets_[e] = adj[e - offsets_[u]].first;
      spans_[e] = adj[e - offsets_[u]].second;
    }
  }
}

std::vector<std::uint32_t> NullDistanceSolver::row_steps(std::size_t source) const {
  if (source >= grid_.size()) throw InputError("source index out of range");
  const std::size_t n = grid_.size();
  std::vector<std::uint32_t> dist(n, kUnreached);
  if (max_span_ == 1) {
    std::vector<std::uint32_t> queue;
    queue.reserve(n);
    queue.push_back(static_cast<std::uint32_t>(source));
    dist[source] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::uint32_t u = queue[head];
      const std::uint32_t nd = dist[u] + 1;
      for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
        const std::uint32_t v = targets_[e];
        if (dist[v] == kUnreached) {
          dist[v] = nd;
          queue.push_back(v);
        }
      }
    }
    return dist;
  }
  const std::size_t width = static_cast<std::size_t>(max_span_) + 1;
  std::vector<std::vector<std::uint32_t>> buckets(width);
  dist[source] = 0;
  buckets[0].push_back(static_cast<std::uint32_t>(source));
  std::size_t pending = 1;
  for (std::uint32_t cur = 0; pending > 0; ++cur) {
    auto& bucket = buckets[cur % width];
    while (!bucket.empty()) {
      const std::uint32_t u = bucket.back();
      bucket.pop_back();
      --pending;
      if (dist[u] != cur) continue;
      for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
        const std::uint32_t v = targets_[e];
        const std::uint32_t nd = cur + spans_[e];
        if (nd < dist[v]) {
          dist[v] = nd;
          buckets[nd % width].push_back(v);
          ++pending;
        }
      }
    }
  }
  return dist;
}

std::vector<double> NullDistanceSolver::row(std::size_t source) const {
  const auto steps = row_steps(source);
  std::vector<double> out(steps.size());
  const double dt = grid_.dt();
  for (std::size_t v = 0; v < steps.size(); ++v) {
    out[v] = steps[v] == kUnreached ? kInf : static_cast<double>(steps[v]) * dt;
  }
  return out;
}

std::vector<double> NullDistanceSolver::row_phi(std::size_t source, const std::vector<double>& phi) const {
  if (source >= grid_.size()) throw InputError("source index out of range");
  if (phi.size() != grid_.levels()) throw InputError("phi must be given at every grid level");
  const std::size_t n = grid_.size();
  const std::size_t m = grid_.fiber_size();
  std::vector<double> dist(n, kInf);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, static_cast<std::uint32_t>(source));
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    const double pu = phi[u / m];
    for (std::size_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
      const std::uint32_t v = targets_[e];
      const double nd = du + std::abs(phi[v / m] - pu);
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  // The causal relation itself joins source and every causal partner directly.
  const double ps = phi[source / m];
  for (std::size_t v = 0; v < n; ++v) {
    if (grid_.related(source, v)) dist[v] = std::min(dist[v], std::abs(phi[v / m] - ps));
  }
  return dist;
}

std::vector<std::size_t> NullDistanceSolver::path(std::size_t p, std::size_t q) const {
  const auto dist = row_steps(p);
  if (q >= dist.size()) throw InputError("target index out of range");
  if (dist[q] == kUnreached) throw InputError("no piecewise causal path between the endpoints");
  std::vector<std::size_t> out{q};
  while (out.back() != p) {
    const std::size_t v = out.back();
    std::size_t pred = v;
    for (std::size_t e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      const std::uint32_t u = targets_[e];
      if (dist[u] != kUnreached && dist[u] + spans_[e] == dist[v]) {
        pred = u;
        break;
      }
    }
    out.push_back(pred);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

RealMatrix NullDistanceSolver::matrix(std::size_t max_points) const {
  const std::size_t n = grid_.size();
  if (n > max_points) throw SizeError("grid has " + std::to_string(n) + " points; full matrix refused");
  RealMatrix out(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto r = row(s);
    std::copy(r.begin(), r.end(), out.row(s).begin());
  }
  return out;
}

void NullDistanceSolver::for_each_row(const std::vector<std::size_t>& sources,
                                      const std::function<void(std::size_t, const std::vector<double>&)>& visit) const {
  for (std::size_t s : sources) visit(s, row(s));
}

TimeSeparationSolver::TimeSeparationSolver(ConeGrid grid) : grid_(std::move(grid)) {
  by_distance_ = distance_order(grid_.fiber());
  f_mid_.resize(grid_.n_t());
  for (std::size_t i = 0; i < grid_.n_t(); ++i) f_mid_[i] = grid_.warping().value(0.5 * (grid_.t(i) + grid_.t(i + 1)));
}

double TimeSeparationSolver::step_length(std::size_t u, std::size_t v) const {
  const ConePoint p = grid_.point(u), q = grid_.point(v);
  if (q.level != p.level + 1) throw InputError("step_length needs consecutive levels");
  const double dt = grid_.t(q.level) - grid_.t(p.level);
  const double fd = f_mid_[p.level] * grid_.fiber().d(p.fiber, q.fiber);
  return std::sqrt(std::max(0.0, (dt - fd) * (dt + fd)));
}

std::vector<double> TimeSeparationSolver::row(std::size_t source, std::vector<std::size_t>* parent) const {
  if (source >= grid_.size()) throw InputError("source index out of range");
  const std::size_t n = grid_.size();
  const std::size_t m = grid_.fiber_size();
  const FiniteLengthSpace& fiber = grid_.fiber();
  std::vector<double> best(n, -kInf);
  if (parent) parent->assign(n, n);
  best[source] = 0.0;
  const ConePoint s = grid_.point(source);
  for (std::size_t i = s.level; i < grid_.n_t(); ++i) {
    const double delta_g = grid_.G_level(i + 1) - grid_.G_level(i);
    const double dt = grid_.t(i + 1) - grid_.t(i);
    const double fm = f_mid_[i];
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t u = grid_.index(i, j);
      const double bu = best[u];
      if (bu == -kInf) continue;
      for (std::uint32_t k : by_distance_[j]) {
        const double d = fiber.d(j, k);
        if (classify(delta_g, d) == CausalKind::None) break;
        const double fd = fm * d;
        const double cand = bu + std::sqrt(std::max(0.0, (dt - fd) * (dt + fd)));
        const std::size_t v = grid_.index(i + 1, k);
        if (cand > best[v]) {
          best[v] = cand;
          if (parent) (*parent)[v] = u;
        }
      }
    }
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (best[v] > 0.0 && grid_.relation(source, v) == CausalKind::Chronological) out[v] = best[v];
  }
  return out;
}

std::vector<std::size_t> TimeSeparationSolver::path(std::size_t p, std::size_t q) const {
  std::vector<std::size_t> parent;
  const auto r = row(p, &parent);
  if (q >= r.size()) throw InputError("target index out of range");
  if (p == q) return {p};
  if (r[q] <= 0.0) return {};
  std::vector<std::size_t> out{q};
  while (out.back() != p) out.push_back(parent[out.back()]);
  std::reverse(out.begin(), out.end());
  return out;
}

RealMatrix TimeSeparationSolver::matrix(std::size_t max_points) const {
  const std::size_t n = grid_.size();
  if (n > max_points) throw SizeError("grid has " + std::to_string(n) + " points; full matrix refused");
  RealMatrix out(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto r = row(s);
    std::copy(r.begin(), r.end(), out.row(s).begin());
  }
  return out;
}

BoundsReport check_null_distance_bounds(const NullDistanceSolver& solver, const std::vector<std::size_t>& sources,
                                        double upper_tol) {
  const ConeGrid& grid = solver.grid();
  const double f_min = grid.warping().f_min(), f_max = grid.warping().f_max();
  BoundsReport report;
  for (std::size_t s : sources) {
    const auto r = solver.row(s);
    const ConePoint p = grid.point(s);
    for (std::size_t v = 0; v < r.size(); ++v) {
      ++report.pairs_checked;
      const ConePoint q = grid.point(v);
      const double d = grid.fiber().d(p.fiber, q.fiber);
      if (!std::isfinite(r[v])) {
        ++report.unreachable;
        continue;
      }
      if (v != s && r[v] == 0.0) ++report.zero_off_diagonal;
      if (r[v] < f_min * d && !near(r[v], f_min * d)) ++report.lower_violations;
      if (grid.related(s, v)) {
        report.causal_max_error = std::max(report.causal_max_error, std::abs(r[v] - std::abs(grid.t(q.level) - grid.t(p.level))));
      } else {
        report.max_upper_excess = std::max(report.max_upper_excess, r[v] - f_max * d);
      }
    }
  }
  report.pass = report.lower_violations == 0 && report.zero_off_diagonal == 0 && report.unreachable == 0 &&
                report.max_upper_excess <= upper_tol + 1e-12 * std::max(1.0, upper_tol) &&
                report.causal_max_error <= 1e-9;
  if (!report.pass && report.max_upper_excess > upper_tol) report.hint = "upper bound exceeded by grid coarseness; refine n_t or the fiber";
  return report;
}

SandwichBoundsReport check_sandwich_bounds(const NullDistanceSolver& solver_f, const NullDistanceSolver& solver_1,
                                           const std::vector<std::size_t>& sources, double upper_tol) {
  const ConeGrid& gf = solver_f.grid();
  const ConeGrid& g1 = solver_1.grid();
  if (gf.size() != g1.size() || gf.n_t() != g1.n_t() || !(gf.interval() == g1.interval())) {
    throw InputError("sandwich comparison needs identical grids");
  }
  const double lo = std::min(1.0, gf.warping().f_min()), hi = std::max(1.0, gf.warping().f_max());
  SandwichBoundsReport report;
  for (std::size_t s : sources) {
    const auto rf = solver_f.row(s);
    const auto r1 = solver_1.row(s);
    for (std::size_t v = 0; v < rf.size(); ++v) {
      ++report.pairs_checked;
      if (lo * r1[v] > rf[v] && !near(lo * r1[v], rf[v])) ++report.lower_violations;
      report.max_upper_excess = std::max(report.max_upper_excess, rf[v] - hi * r1[v]);
    }
  }
  report.pass = report.lower_violations == 0 && report.max_upper_excess <= upper_tol + 1e-12 * std::max(1.0, upper_tol);
  return report;
}

std::vector<double> phi_levels(const ConeGrid& grid, const TimeReparametrization& phi) {
  if (!phi.phi) throw InputError("time reparametrization has no phi");
  std::vector<double> out(grid.levels());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = phi.phi(grid.t(i));
    if (!std::isfinite(out[i])) throw InputError("phi is not finite on the grid");
    if (i > 0 && !(out[i] > out[i - 1])) throw InputError("phi is not strictly increasing on the grid");
  }
  return out;
}

PhiReport check_phi_time_function(const NullDistanceSolver& solver, const TimeReparametrization& phi,
                                  const std::vector<std::size_t>& sources) {
  const ConeGrid& grid = solver.grid();
  const auto values = phi_levels(grid, phi);
  if (!phi.dphi) throw InputError("time reparametrization has no derivative");
  PhiReport report;
  for (double t : grid.warping().sample_grid()) {
    const double slope = phi.dphi(t);
    if (!(slope > 0.0)) throw InputError("phi' must be positive on I");
    report.c = std::max(report.c, 1.0 / (slope * grid.warping().value(t)));
  }
  report.worst_gap_margin = kInf;
  const double scale = std::max(std::abs(values.front()), std::abs(values.back()));
  for (std::size_t s : sources) {
    const auto r = solver.row_phi(s, values);
    const ConePoint p = grid.point(s);
    for (std::size_t v = 0; v < r.size(); ++v) {
      if (v == s) continue;
      ConePoint lo = p, hi = grid.point(v);
      if (hi.level < lo.level) std::swap(lo, hi);
      const double dphi = values[hi.level] - values[lo.level];
      if (grid.related(s, v)) {
        ++report.causal_pairs;
        report.causal_max_error = std::max(report.causal_max_error, std::abs(r[v] - dphi));
        continue;
      }
      ++report.noncausal_pairs;
      const double dg = grid.G_level(hi.level) - grid.G_level(lo.level);
      const double bound = dphi + (grid.fiber().d(lo.fiber, hi.fiber) - dg) / report.c;
      const double margin = r[v] - bound;
      report.worst_gap_margin = std::min(report.worst_gap_margin, margin);
      if (margin < -1e-12 * std::max(1.0, scale)) ++report.gap_violations;
    }
  }
  report.pass = report.gap_violations == 0 && report.causal_max_error <= 1e-12 * std::max(1.0, scale);
  return report;
}

FiberComparison fiber_metric_comparison(const NullDistanceSolver& solver, double t0, double tol) {
  const ConeGrid& grid = solver.grid();
  FiberComparison out;
  out.level = grid.level_of(t0);
  out.tol = tol < 0.0 ? 2.0 * grid.dt() : tol;
  out.min_ratio = kInf;
  const double f_min = grid.warping().f_min(), f_max = grid.warping().f_max();
  const bool identity = grid.warping().kind() == WarpingKind::Constant && f_min == 1.0;
  const std::size_t m = grid.fiber_size();
  for (std::size_t j = 0; j < m; ++j) {
    const auto r = solver.row(grid.index(out.level, j));
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      const double d = grid.fiber().d(j, k);
      const double dh = r[grid.index(out.level, k)];
      out.min_ratio = std::min(out.min_ratio, dh / d);
      out.max_ratio = std::max(out.max_ratio, dh / d);
      if (dh < f_min * d && !near(dh, f_min * d)) out.lower_ok = false;
      out.max_upper_excess = std::max(out.max_upper_excess, dh - f_max * d);
      out.max_identity_error = std::max(out.max_identity_error, std::abs(dh - d));
    }
  }
  if (m < 2) out.min_ratio = out.max_ratio = 1.0;
  const double allowed = out.tol + 1e-12 * std::max(1.0, out.tol);
  out.pass = out.lower_ok && out.max_upper_excess <= allowed && (!identity || out.max_identity_error <= allowed);
  return out;
}

MinimizerAnalysis minimizer_analysis(const NullDistanceSolver& solver, std::size_t p, std::size_t q) {
  const ConeGrid& grid = solver.grid();
  if (p >= grid.size() || q >= grid.size()) throw InputError("point index out of range");
  MinimizerAnalysis out;
  out.grid_scale = grid.dt();
  if (p == q) {
    out.diagnostic = "identical endpoints";
    return out;
  }
  if (grid.related(p, q)) {
    out.vacuous = true;
    out.diagnostic = "causally related endpoints: a single causal segment minimizes";
    return out;
  }
  out.path = solver.path(p, q);
  std::size_t start = 0;
  int dir = 0;
  auto close_run = [&](std::size_t end) {
    if (dir == 0) return;
    const ConePoint a = grid.point(out.path[start]), b = grid.point(out.path[end]);
    const double dg = std::abs(grid.G_level(b.level) - grid.G_level(a.level));
    out.runs.push_back({out.path[start], out.path[end], dir, dg - grid.fiber().d(a.fiber, b.fiber)});
  };
  for (std::size_t k = 0; k + 1 < out.path.size(); ++k) {
    const ConePoint a = grid.point(out.path[k]), b = grid.point(out.path[k + 1]);
    const int step = b.level > a.level ? 1 : -1;
    if (step != dir) {
      close_run(k);
      start = k;
      dir = step;
    }
  }
  close_run(out.path.size() - 1);
  return out;
}

}  // namespace nullgeo
