#include "nullgeo/lpls.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "nullgeo/error.hpp"

namespace nullgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string pair_str(std::size_t x, std::size_t y) {
  return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

std::string triple_str(std::size_t x, std::size_t y, std::size_t z) {
  return "(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")";
}

bool close(double x, double y, double scale) {
  if (x == y) return true;
  return std::abs(x - y) <= 1e-12 * std::max({1.0, scale, std::abs(x), std::abs(y)});
}

void check_shapes(const DiscretePreLengthSpace& s) {
  const std::size_t n = s.size();
  auto ok = [n](std::size_t r, std::size_t c) { return r == n && c == n; };
  if (!ok(s.causal.rows(), s.causal.cols()) || !ok(s.chrono.rows(), s.chrono.cols()) ||
      !ok(s.rho.rows(), s.rho.cols())) {
    throw InputError("relation matrices do not match the point count " + std::to_string(n));
  }
}

void check_tau(const DiscretePreLengthSpace& s, const TimeFunction& tau) {
  if (tau.size() != s.size()) throw InputError("time function has the wrong number of values");
  for (double v : tau) {
    if (!std::isfinite(v)) throw InputError("time function values must be finite");
  }
}

bool related(const DiscretePreLengthSpace& s, std::size_t u, std::size_t v) {
  return u != v && (s.causal(u, v) || s.causal(v, u));
}

// Dijkstra over the symmetrized causal graph with weights |tau(u) - tau(v)|.
std::vector<double> null_row(const DiscretePreLengthSpace& s, const TimeFunction& tau, std::size_t source,
                             std::vector<std::size_t>* parent) {
  const std::size_t n = s.size();
  std::vector<double> dist(n, kInf);
  std::vector<char> done(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (!related(s, u, v)) continue;
      const double cand = du + std::abs(tau[u] - tau[v]);
      if (cand < dist[v]) {
        dist[v] = cand;
        heap.emplace(cand, v);
      }
    }
  }
  if (parent) {
    parent->assign(n, n);
    for (std::size_t v = 0; v < n; ++v) {
      if (v == source || !std::isfinite(dist[v])) continue;
      for (std::size_t u = 0; u < n; ++u) {
        if (related(s, u, v) && std::isfinite(dist[u]) && dist[u] + std::abs(tau[u] - tau[v]) == dist[v]) {
          (*parent)[v] = u;
          break;
        }
      }
    }
  }
  return dist;
}

}  // namespace

ValidationReport validate_pls(const DiscretePreLengthSpace& s) {
  check_shapes(s);
  const std::size_t n = s.size();
  ValidationReport report;
  auto add = [&](std::string code, std::vector<std::size_t> idx, std::string msg) {
    report.issues.push_back({std::move(code), std::move(idx), std::move(msg)});
  };
  for (std::size_t x = 0; x < n; ++x) {
    if (!s.causal(x, x)) add("reflexivity", {x}, "causal relation not reflexive at " + std::to_string(x));
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double r = s.rho(x, y);
      if (std::isnan(r) || r < 0.0) {
        add("rho-negative", {x, y}, "rho" + pair_str(x, y) + " is negative or NaN");
        continue;
      }
      if (s.chrono(x, y) && !s.causal(x, y)) add("chrono-causal", {x, y}, "chronological but not causal at " + pair_str(x, y));
      if ((r > 0.0) != static_cast<bool>(s.chrono(x, y))) {
        add("rho-chrono", {x, y}, "rho > 0 disagrees with chronology at " + pair_str(x, y));
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      for (std::size_t z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        if (s.causal(x, y) && s.causal(y, z)) {
          if (!s.causal(x, z)) add("causal-transitivity", {x, y, z}, "causal relation not transitive at " + triple_str(x, y, z));
          const double chain = s.rho(x, y) + s.rho(y, z);
          const double direct = s.rho(x, z);
          if (direct < chain && !close(direct, chain, 0.0)) {
            add("reverse-triangle", {x, y, z}, "rho" + pair_str(x, z) + " < rho" + pair_str(x, y) + " + rho" + pair_str(y, z));
          }
        }
        if (s.chrono(x, y) && s.chrono(y, z) && !s.chrono(x, z)) {
          add("chrono-transitivity", {x, y, z}, "chronological relation not transitive at " + triple_str(x, y, z));
        }
      }
    }
  }
  return report;
}

Verdict check_time_function(const DiscretePreLengthSpace& s, const TimeFunction& tau) {
  check_shapes(s);
  check_tau(s, tau);
  for (std::size_t x = 0; x < s.size(); ++x) {
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (x != y && s.causal(x, y) && !(tau[x] < tau[y])) {
        return {false, {x, y}, "tau not strictly increasing from " + std::to_string(x) + " to " + std::to_string(y)};
      }
    }
  }
  return {};
}

Verdict check_anti_lipschitz(const DiscretePreLengthSpace& s, const TimeFunction& tau,
                             const std::vector<std::size_t>& subset, const RealMatrix& d_subset) {
  check_shapes(s);
  check_tau(s, tau);
  if (d_subset.rows() != subset.size() || d_subset.cols() != subset.size()) {
    throw InputError("subset metric has the wrong size");
  }
  const auto report = validate_metric(d_subset);
  if (!report.ok()) throw InputError("subset metric is invalid: " + report.issues.front().message);
  for (std::size_t a = 0; a < subset.size(); ++a) {
    if (subset[a] >= s.size()) throw InputError("subset index out of range");
  }
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = 0; b < subset.size(); ++b) {
      const std::size_t x = subset[a], y = subset[b];
      if (x == y || !s.causal(x, y)) continue;
      const double gap = tau[y] - tau[x];
      if (gap < d_subset(a, b) && !close(gap, d_subset(a, b), 0.0)) {
        return {false, {x, y}, "tau(" + std::to_string(y) + ") - tau(" + std::to_string(x) + ") < d_U"};
      }
    }
  }
  return {};
}

void check_path(const DiscretePreLengthSpace& s, const PiecewiseCausalPath& path) {
  check_shapes(s);
  if (path.vertices.empty()) throw InputError("path has no vertices");
  if (path.tags.size() + 1 != path.vertices.size()) throw InputError("path needs one tag per segment");
  for (std::size_t v : path.vertices) {
    if (v >= s.size()) throw InputError("path vertex out of range");
  }
  for (std::size_t k = 0; k < path.tags.size(); ++k) {
    const std::size_t u = path.vertices[k], v = path.vertices[k + 1];
    bool ok = false;
    switch (path.tags[k]) {
      case SegmentTag::Future: ok = s.causal(u, v); break;
      case SegmentTag::Past: ok = s.causal(v, u); break;
      case SegmentTag::Trivial: ok = u == v; break;
    }
    if (!ok) throw InputError("segment " + std::to_string(k) + " does not match its tag");
  }
}

double path_null_length(const DiscretePreLengthSpace& s, const TimeFunction& tau, const PiecewiseCausalPath& path) {
  check_path(s, path);
  check_tau(s, tau);
  double total = 0.0;
  std::size_t run_start = path.vertices.front();
  std::optional<SegmentTag> run_tag;
  for (std::size_t k = 0; k < path.tags.size(); ++k) {
    const SegmentTag tag = path.tags[k];
    if (tag == SegmentTag::Trivial) continue;
    if (run_tag && *run_tag != tag) {
      total += std::abs(tau[path.vertices[k]] - tau[run_start]);
      run_start = path.vertices[k];
    }
    run_tag = tag;
  }
  if (run_tag) total += std::abs(tau[path.vertices.back()] - tau[run_start]);
  return total;
}

NullDistance null_distance_matrix(const DiscretePreLengthSpace& s, const TimeFunction& tau) {
  check_shapes(s);
  check_tau(s, tau);
  const std::size_t n = s.size();
  NullDistance out{RealMatrix(n, n), {}};
  std::size_t unreachable = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto row = null_row(s, tau, p, nullptr);
    for (std::size_t q = 0; q < n; ++q) {
      out.dist(p, q) = row[q];
      if (!std::isfinite(row[q]) && p < q) {
        if (unreachable < 5) {
          out.warnings.push_back("no piecewise causal path between " + std::to_string(p) + " and " + std::to_string(q));
        }
        ++unreachable;
      }
    }
  }
  if (unreachable > 0) {
    out.warnings.push_back(std::to_string(unreachable) +
                           " pair(s) unreachable: the symmetrized causal graph is disconnected, so not every point "
                           "lies on a common chain of causal relations; those entries are +inf");
  }
  return out;
}

PiecewiseCausalPath minimizing_path(const DiscretePreLengthSpace& s, const TimeFunction& tau, std::size_t p,
                                    std::size_t q) {
  check_shapes(s);
  check_tau(s, tau);
  if (p >= s.size() || q >= s.size()) throw InputError("path endpoint out of range");
  std::vector<std::size_t> parent;
  const auto dist = null_row(s, tau, p, &parent);
  if (!std::isfinite(dist[q])) throw InputError("no piecewise causal path between the endpoints");
  PiecewiseCausalPath path;
  path.vertices.push_back(q);
  while (path.vertices.back() != p) path.vertices.push_back(parent[path.vertices.back()]);
  std::reverse(path.vertices.begin(), path.vertices.end());
  for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k) {
    const std::size_t u = path.vertices[k], v = path.vertices[k + 1];
    path.tags.push_back(s.causal(u, v) ? SegmentTag::Future : SegmentTag::Past);
  }
  return path;
}

bool PropertyReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

PropertyReport properties_report(const DiscretePreLengthSpace& s, const TimeFunction& tau) {
  check_shapes(s);
  check_tau(s, tau);
  const std::size_t n = s.size();
  double scale = 1.0;
  for (double v : tau) scale = std::max(scale, std::abs(v));
  const RealMatrix d = null_distance_matrix(s, tau).dist;

  PropertyReport report;
  auto fail = [](PropertyCheck& c, std::vector<std::size_t> w, std::string detail) {
    if (!c.pass) return;
    c.pass = false;
    c.witness = std::move(w);
    c.detail = std::move(detail);
  };

  PropertyCheck lower{"lower-bound", true, {}, ""};
  PropertyCheck causal_exact{"causal-exactness", true, {}, ""};
  PropertyCheck pseudometric{"pseudometric", true, {}, ""};
  for (std::size_t p = 0; p < n; ++p) {
    if (d(p, p) != 0.0) fail(pseudometric, {p}, "nonzero diagonal");
    for (std::size_t q = 0; q < n; ++q) {
      const double gap = std::abs(tau[q] - tau[p]);
      if (d(p, q) < gap && !close(d(p, q), gap, scale)) fail(lower, {p, q}, "null distance below |tau(q) - tau(p)|");
      if (p != q && s.causal(p, q) && !close(d(p, q), tau[q] - tau[p], scale)) {
        fail(causal_exact, {p, q}, "causal pair with null distance != tau(q) - tau(p)");
      }
      if (d(p, q) != d(q, p)) fail(pseudometric, {p, q}, "asymmetric");
      for (std::size_t r = 0; r < n; ++r) {
        const double via = d(p, r) + d(r, q);
        if (d(p, q) > via && !close(d(p, q), via, scale)) fail(pseudometric, {p, r, q}, "triangle inequality");
      }
    }
  }

  PropertyCheck monotone{"diamond-monotonicity", true, {}, ""};
  PropertyCheck bounded{"diamond-bound", true, {}, ""};
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (!s.causal(p, q)) continue;
      std::vector<std::size_t> diamond;
      for (std::size_t x = 0; x < n; ++x) {
        if (s.causal(p, x) && s.causal(x, q)) diamond.push_back(x);
      }
      const double bound = 2.0 * (tau[q] - tau[p]);
      for (std::size_t x : diamond) {
        if (!(tau[p] <= tau[x] && tau[x] <= tau[q])) fail(monotone, {p, x, q}, "tau not monotone across the diamond");
        for (std::size_t y : diamond) {
          if (d(x, y) > bound && !close(d(x, y), bound, scale)) {
            fail(bounded, {p, x, y, q}, "null distance in the diamond exceeds 2(tau(q) - tau(p))");
          }
        }
      }
    }
  }

  PropertyCheck rescale{"affine-rescaling", true, {}, ""};
  TimeFunction scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = 2.0 * tau[i] + 5.0;
  const RealMatrix d2 = null_distance_matrix(s, scaled).dist;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (!close(d2(p, q), 2.0 * d(p, q), 2.0 * scale + 5.0)) fail(rescale, {p, q}, "2 tau + 5 does not double the entry");
    }
  }

  report.checks = {lower, causal_exact, monotone, bounded, rescale, pseudometric};
  return report;
}

ConvexNeighborhood causally_convex_neighborhood(const DiscretePreLengthSpace& s, const TimeFunction& tau,
                                                std::size_t p, const std::vector<std::size_t>& subset,
                                                const RealMatrix& d_subset, double eps) {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  const Verdict anti = check_anti_lipschitz(s, tau, subset, d_subset);
  if (!anti.pass) throw PreconditionError("tau is not anti-Lipschitz on U: " + anti.message);
  const auto where = std::find(subset.begin(), subset.end(), p);
  if (where == subset.end()) throw PreconditionError("p must belong to U");
  const std::size_t pi = static_cast<std::size_t>(where - subset.begin());

  const std::size_t n = s.size();
  std::vector<char> in_subset(n, 0);
  for (std::size_t q : subset) in_subset[q] = 1;
  double outside = kInf;
  for (std::size_t q = 0; q < n; ++q) {
    if (!in_subset[q]) outside = std::min(outside, s.base.d(p, q));
  }
  double inner = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    if (d_subset(pi, a) <= 2.0 * eps) inner = std::max(inner, s.base.d(p, subset[a]));
  }
  if (!(inner < 0.5 * outside)) {
    throw PreconditionError("the d_U-ball of radius 2 eps around p reaches the boundary of U");
  }

  std::vector<double> phi(n, 0.0);
  for (std::size_t a = 0; a < subset.size(); ++a) phi[subset[a]] = std::max(0.0, eps - 0.5 * d_subset(pi, a));

  ConvexNeighborhood out;
  std::vector<char> member(n, 0);
  for (std::size_t q = 0; q < n; ++q) {
    if (tau[q] - phi[q] < tau[p] && tau[p] < tau[q] + phi[q]) {
      member[q] = 1;
      out.members.push_back(q);
    }
  }
  TimeFunction plus(n), minus(n);
  for (std::size_t q = 0; q < n; ++q) {
    plus[q] = tau[q] + phi[q];
    minus[q] = tau[q] - phi[q];
  }
  out.tau_plus = check_time_function(s, plus);
  out.tau_minus = check_time_function(s, minus);
  out.certified = true;
  for (std::size_t a : out.members) {
    for (std::size_t b : out.members) {
      if (a == b || !s.causal(a, b)) continue;
      for (std::size_t w = 0; w < n && out.certified; ++w) {
        if (!member[w] && s.causal(a, w) && s.causal(w, b)) {
          out.certified = false;
          out.counterexample = {a, w, b};
        }
      }
    }
  }
  out.certified = out.certified && out.tau_plus.pass && out.tau_minus.pass;
  return out;
}

double rho_length(const DiscretePreLengthSpace& s, const std::vector<std::size_t>& chain) {
  check_shapes(s);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
    const std::size_t u = chain[k], v = chain[k + 1];
    if (u >= s.size() || v >= s.size()) throw InputError("chain index out of range");
    if (!s.causal(u, v)) throw InputError("chain is not causal at position " + std::to_string(k));
    total += s.rho(u, v);
  }
  return total;
}

TimeSeparationClosure rho_closure(const DiscretePreLengthSpace& s) {
  check_shapes(s);
  const std::size_t n = s.size();
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && s.causal(u, v)) ++indegree[v];
    }
  }
  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<>());
    const std::size_t u = ready.back();
    ready.pop_back();
    order.push_back(u);
    for (std::size_t v = 0; v < n; ++v) {
      if (u != v && s.causal(u, v) && --indegree[v] == 0) ready.push_back(v);
    }
  }
  if (order.size() != n) {
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (u != v && s.causal(u, v) && s.causal(v, u)) {
          throw PreconditionError("causal cycle between " + std::to_string(u) + " and " + std::to_string(v));
        }
      }
    }
    throw PreconditionError("causal relation contains a cycle through distinct points");
  }

  TimeSeparationClosure out{RealMatrix(n, n), {}};
  std::vector<double> best(n);
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(best.begin(), best.end(), -kInf);
    best[src] = 0.0;
    for (std::size_t u : order) {
      if (best[u] == -kInf) continue;
      for (std::size_t v = 0; v < n; ++v) {
        if (u != v && s.causal(u, v)) best[v] = std::max(best[v], best[u] + s.rho(u, v));
      }
    }
    for (std::size_t v = 0; v < n; ++v) out.T(src, v) = best[v] == -kInf ? 0.0 : best[v];
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x != y && !close(s.rho(x, y), out.T(x, y), 0.0)) out.mismatches.emplace_back(x, y);
    }
  }
  return out;
}

}  // namespace nullgeo
