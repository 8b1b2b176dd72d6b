#include "nullgeo/metric_core.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "nullgeo/error.hpp"
#include "nullgeo/model_spaces.hpp"

namespace nullgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

std::string summarize(const ValidationReport& report) {
  std::ostringstream out;
  out << report.issues.size() << " metric violation(s)";
  for (std::size_t k = 0; k < std::min<std::size_t>(report.issues.size(), 3); ++k) {
    out << "; " << report.issues[k].message;
  }
  return out.str();
}

// Dijkstra over an adjacency list; returns distances from `source`.
std::vector<double> shortest_from(const std::vector<std::vector<std::pair<std::size_t, double>>>& adj,
                                  std::size_t source, std::vector<std::size_t>* parent = nullptr) {
  std::vector<double> dist(adj.size(), kInf);
  if (parent) parent->assign(adj.size(), adj.size());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    for (auto [v, w] : adj[u]) {
      const double cand = du + w;
      if (cand < dist[v] || (parent && cand == dist[v] && u < (*parent)[v])) {
        if (cand < dist[v]) heap.emplace(cand, v);
        dist[v] = cand;
        if (parent) (*parent)[v] = u;
      }
    }
  }
  return dist;
}

std::vector<std::vector<std::pair<std::size_t, double>>> adjacency(const std::vector<WeightedEdge>& edges,
                                                                   std::size_t n) {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].emplace_back(e.v, e.weight);
    adj[e.v].emplace_back(e.u, e.weight);
  }
  return adj;
}

}  // namespace

ValidationReport validate_metric(const RealMatrix& dist) {
  if (!dist.square()) throw InputError("distance matrix is not square");
  const std::size_t n = dist.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(dist(i, j))) {
        throw InputError("non-finite distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  ValidationReport report;
  auto add = [&](std::string code, std::vector<std::size_t> idx, std::string msg) {
    report.issues.push_back({std::move(code), std::move(idx), std::move(msg)});
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) add("diagonal", {i}, "d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::string pair = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (dist(i, j) != dist(j, i)) add("symmetry", {i, j}, "asymmetric at " + pair);
      if (dist(i, j) < 0.0 || dist(j, i) < 0.0) add("negative", {i, j}, "negative distance at " + pair);
      else if (dist(i, j) == 0.0 || dist(j, i) == 0.0) add("definiteness", {i, j}, "zero distance at " + pair);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double direct = dist(i, k);
        const double via = dist(i, j) + dist(j, k);
        if (direct > via + kMetricTolerance) {
          add("triangle", {i, j, k},
              "d(" + std::to_string(i) + "," + std::to_string(k) + ") exceeds the path through " +
                  std::to_string(j));
        }
      }
    }
  }
  return report;
}

FiniteLengthSpace::FiniteLengthSpace(std::vector<std::string> ids, RealMatrix dist)
    : ids_(std::move(ids)), dist_(std::move(dist)) {
  if (ids_.size() != dist_.rows()) throw InputError("point id count does not match the matrix size");
  const auto report = validate_metric(dist_);
  if (!report.ok()) throw InputError(summarize(report));
}

FiniteLengthSpace::FiniteLengthSpace(RealMatrix dist)
    : FiniteLengthSpace(default_ids(dist.rows()), std::move(dist)) {}

double FiniteLengthSpace::diameter() const {
  double best = 0.0;
  for (double v : dist_.data()) best = std::max(best, v);
  return best;
}

double FiniteLengthSpace::max_gap() const {
  double gap = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double nearest = kInf;
    for (std::size_t j = 0; j < size(); ++j) {
      if (j != i) nearest = std::min(nearest, dist_(i, j));
    }
    if (std::isfinite(nearest)) gap = std::max(gap, nearest);
  }
  return gap;
}

FiniteLengthSpace FiniteLengthSpace::refined(double max_edge) const {
  if (provenance_ != Provenance::GraphInduced) {
    throw UnsupportedError("only graph-induced spaces can be refined");
  }
  if (!(max_edge > 0.0)) throw ParameterError("refinement edge length must be positive");
  std::vector<WeightedEdge> edges;
  std::vector<std::string> ids = ids_;
  std::size_t next = size();
  for (const auto& e : edges_) {
    const auto pieces = static_cast<std::size_t>(std::ceil(e.weight / max_edge - 1e-9));
    if (pieces <= 1) {
      edges.push_back(e);
      continue;
    }
    const double w = e.weight / static_cast<double>(pieces);
    std::size_t prev = e.u;
    for (std::size_t k = 1; k < pieces; ++k) {
      ids.push_back(ids_[e.u] + "~" + ids_[e.v] + ":" + std::to_string(k));
      edges.push_back({prev, next, w});
      prev = next++;
    }
    edges.push_back({prev, e.v, w});
  }
  return intrinsic_metric(edges, next, std::move(ids));
}

FiniteLengthSpace FiniteLengthSpace::subspace(const std::vector<std::size_t>& indices) const {
  RealMatrix sub(indices.size(), indices.size());
  std::vector<std::string> ids;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] >= size()) throw InputError("subspace index out of range");
    ids.push_back(ids_[indices[a]]);
    for (std::size_t b = 0; b < indices.size(); ++b) sub(a, b) = dist_(indices[a], indices[b]);
  }
  return FiniteLengthSpace(std::move(ids), std::move(sub));
}

std::vector<std::size_t> FiniteLengthSpace::geodesic_chain(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw InputError("geodesic endpoint out of range");
  if (i == j) return {i};
  if (provenance_ == Provenance::GraphInduced) {
    std::vector<std::size_t> parent;
    shortest_from(adjacency(edges_, size()), i, &parent);
    std::vector<std::size_t> chain{j};
    while (chain.back() != i) chain.push_back(parent[chain.back()]);
    std::reverse(chain.begin(), chain.end());
    return chain;
  }
  // Matrix input: hop to the nearest point lying metrically between the
  // current point and the target.
  std::vector<std::size_t> chain{i};
  std::size_t cur = i;
  while (cur != j) {
    std::size_t best = j;
    double best_step = dist_(cur, j);
    for (std::size_t c = 0; c < size(); ++c) {
      if (c == cur || c == j) continue;
      const double step = dist_(cur, c);
      const double slack = step + dist_(c, j) - dist_(cur, j);
      if (std::abs(slack) <= 1e-12 * std::max(1.0, dist_(cur, j)) && step < best_step) {
        best = c;
        best_step = step;
      }
    }
    chain.push_back(best);
    cur = best;
  }
  return chain;
}

FiniteLengthSpace intrinsic_metric(const std::vector<WeightedEdge>& edges, std::size_t n,
                                   std::vector<std::string> ids) {
  if (ids.empty()) ids = default_ids(n);
  if (ids.size() != n) throw InputError("point id count does not match the point count");
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) throw InputError("edge endpoint out of range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) throw InputError("edge weights must be positive and finite");
  }
  const auto adj = adjacency(edges, n);
  RealMatrix dist(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto row = shortest_from(adj, s);
    for (std::size_t t = 0; t < n; ++t) dist(s, t) = row[t];
  }
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      // Dijkstra from both ends may round differently; keep the matrix symmetric.
      const double v = std::min(dist(s, t), dist(t, s));
      dist(s, t) = dist(t, s) = v;
    }
  }
  if (n > 0) {
    std::vector<int> component(n, -1);
    int count = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (component[s] >= 0) continue;
      for (std::size_t t = 0; t < n; ++t) {
        if (std::isfinite(dist(s, t))) component[t] = count;
      }
      ++count;
    }
    if (count > 1) {
      std::ostringstream out;
      out << "graph is disconnected into " << count << " components:";
      for (int c = 0; c < count; ++c) {
        out << " {";
        bool first = true;
        for (std::size_t t = 0; t < n; ++t) {
          if (component[t] != c) continue;
          out << (first ? "" : ",") << ids[t];
          first = false;
        }
        out << "}";
      }
      throw InputError(out.str());
    }
  }
  FiniteLengthSpace space;
  space.ids_ = std::move(ids);
  space.dist_ = std::move(dist);
  space.provenance_ = Provenance::GraphInduced;
  space.edges_ = edges;
  const auto report = validate_metric(space.dist_);
  if (!report.ok()) throw InputError(summarize(report));
  return space;
}

FiniteLengthSpace path_metric(std::size_t n, double length) {
  if (n == 0) throw ParameterError("path metric needs at least one point");
  if (!(length > 0.0)) throw ParameterError("path length must be positive");
  FiniteLengthSpace space;
  space.ids_ = default_ids(n);
  space.dist_ = RealMatrix(n, n);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  std::vector<double> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = length * static_cast<double>(i) / denom;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) space.dist_(i, j) = std::abs(pos[i] - pos[j]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) space.edges_.push_back({i, i + 1, pos[i + 1] - pos[i]});
  space.provenance_ = Provenance::GraphInduced;
  return space;
}

FiniteLengthSpace tripod(std::size_t leg_points, double leg_length) {
  if (leg_points == 0) throw ParameterError("tripod legs need at least one point");
  std::vector<WeightedEdge> edges;
  const double h = leg_length / static_cast<double>(leg_points);
  std::vector<std::string> ids{"c"};
  std::size_t next = 1;
  for (int leg = 0; leg < 3; ++leg) {
    std::size_t prev = 0;
    for (std::size_t k = 1; k <= leg_points; ++k) {
      ids.push_back(std::string(1, static_cast<char>('a' + leg)) + std::to_string(k));
      edges.push_back({prev, next, h});
      prev = next++;
    }
  }
  return intrinsic_metric(edges, next, std::move(ids));
}

EpsilonNet epsilon_net(const FiniteLengthSpace& space, double eps) {
  if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
  EpsilonNet net;
  net.radius = eps;
  if (space.size() == 0) return net;
  std::vector<double> to_net(space.size(), kInf);
  std::size_t next = 0;
  while (true) {
    net.center_indices.push_back(next);
    for (std::size_t i = 0; i < space.size(); ++i) to_net[i] = std::min(to_net[i], space.d(next, i));
    // Farthest point, lowest index on ties.
    std::size_t far = 0;
    for (std::size_t i = 1; i < space.size(); ++i) {
      if (to_net[i] > to_net[far]) far = i;
    }
    net.covering_radius_achieved = to_net[far];
    if (to_net[far] <= eps) break;
    next = far;
  }
  return net;
}

void check_correspondence(const Correspondence& r, std::size_t size_a, std::size_t size_b) {
  std::vector<char> seen_a(size_a, 0), seen_b(size_b, 0);
  for (auto [i, j] : r.pairs) {
    if (i >= size_a || j >= size_b) throw InputError("correspondence index out of range");
    seen_a[i] = seen_b[j] = 1;
  }
  for (std::size_t i = 0; i < size_a; ++i) {
    if (!seen_a[i]) throw InputError("correspondence misses point " + std::to_string(i) + " of the first space");
  }
  for (std::size_t j = 0; j < size_b; ++j) {
    if (!seen_b[j]) throw InputError("correspondence misses point " + std::to_string(j) + " of the second space");
  }
}

double distortion(const Correspondence& r, const FiniteLengthSpace& a, const FiniteLengthSpace& b) {
  for (auto [i, j] : r.pairs) {
    if (i >= a.size() || j >= b.size()) throw InputError("correspondence index out of range");
  }
  double worst = 0.0;
  for (auto [i, j] : r.pairs) {
    for (auto [k, l] : r.pairs) worst = std::max(worst, std::abs(a.d(i, k) - b.d(j, l)));
  }
  return worst;
}

Correspondence full_correspondence(std::size_t size_a, std::size_t size_b) {
  Correspondence r;
  for (std::size_t i = 0; i < size_a; ++i) {
    for (std::size_t j = 0; j < size_b; ++j) r.pairs.emplace_back(i, j);
  }
  return r;
}

std::vector<Correspondence> enumerate_correspondences(std::size_t size_a, std::size_t size_b) {
  const std::size_t total = size_a * size_b;
  if (total > 20) throw SizeError("correspondence enumeration is limited to 20 candidate pairs");
  std::vector<Correspondence> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << total); ++mask) {
    std::uint64_t rows = 0, cols = 0;
    Correspondence r;
    for (std::size_t bit = 0; bit < total; ++bit) {
      if (!(mask >> bit & 1U)) continue;
      const std::size_t i = bit / size_b, j = bit % size_b;
      rows |= std::uint64_t{1} << i;
      cols |= std::uint64_t{1} << j;
      r.pairs.emplace_back(i, j);
    }
    if (rows == (std::uint64_t{1} << size_a) - 1 && cols == (std::uint64_t{1} << size_b) - 1) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

namespace {

// Depth-first search for a correspondence whose pairs are pairwise within
// `threshold`. Every correspondence contains a minimal one, and a minimal one
// is reached by repeatedly covering the first uncovered point, so the search
// is complete.
class CoverSearch {
 public:
  CoverSearch(const FiniteLengthSpace& a, const FiniteLengthSpace& b, double threshold)
      : a_(a), b_(b), threshold_(threshold), row_(a.size(), 0), col_(b.size(), 0) {}

  bool run() { return extend(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& chosen() const { return chosen_; }

 private:
  bool compatible(std::size_t i, std::size_t j) const {
    for (auto [k, l] : chosen_) {
      if (std::abs(a_.d(i, k) - b_.d(j, l)) > threshold_) return false;
    }
    return true;
  }

  bool place(std::size_t i, std::size_t j) {
    if (!compatible(i, j)) return false;
    chosen_.emplace_back(i, j);
    ++row_[i];
    ++col_[j];
    if (extend()) return true;
    --row_[i];
    --col_[j];
    chosen_.pop_back();
    return false;
  }

  bool extend() {
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (row_[i]) continue;
      for (std::size_t j = 0; j < b_.size(); ++j) {
        if (place(i, j)) return true;
      }
      return false;
    }
    for (std::size_t j = 0; j < b_.size(); ++j) {
      if (col_[j]) continue;
      for (std::size_t i = 0; i < a_.size(); ++i) {
        if (place(i, j)) return true;
      }
      return false;
    }
    return true;
  }

  const FiniteLengthSpace& a_;
  const FiniteLengthSpace& b_;
  double threshold_;
  std::vector<int> row_, col_;
  std::vector<std::pair<std::size_t, std::size_t>> chosen_;
};

}  // namespace

GHResult gh_distance_exact(const FiniteLengthSpace& a, const FiniteLengthSpace& b, std::size_t max_pairs) {
  if (a.size() == 0 || b.size() == 0) throw InputError("Gromov-Hausdorff distance needs non-empty spaces");
  if (a.size() * b.size() > max_pairs) {
    throw SizeError("exact Gromov-Hausdorff distance is limited to |A|*|B| <= " + std::to_string(max_pairs) +
                    " (got " + std::to_string(a.size() * b.size()) + ")");
  }
  // The optimal distortion is one of the pairwise discrepancies.
  std::vector<double> candidates{0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        for (std::size_t l = 0; l < b.size(); ++l) candidates.push_back(std::abs(a.d(i, k) - b.d(j, l)));
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::size_t lo = 0, hi = candidates.size() - 1;  // the full correspondence always fits hi
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (CoverSearch(a, b, candidates[mid]).run()) hi = mid;
    else lo = mid + 1;
  }
  CoverSearch search(a, b, candidates[lo]);
  search.run();
  GHResult result;
  result.witness.pairs = search.chosen();
  std::sort(result.witness.pairs.begin(), result.witness.pairs.end());
  result.distance = 0.5 * distortion(result.witness, a, b);
  return result;
}

QuadrupleVerdict quadruple_curvature_check(const FiniteLengthSpace& space, double k, double tol) {
  if (!(tol >= 0.0)) throw ParameterError("tolerance must be non-negative");
  QuadrupleVerdict verdict;
  verdict.k = k;
  verdict.tol = tol;
  const std::size_t n = space.size();
  const double two_pi = 2.0 * std::numbers::pi;
  auto consider = [&](QuadrupleWitness w, bool failing) {
    if (failing) verdict.pass = false;
    if (!verdict.worst || (w.model_constraint && !verdict.worst->model_constraint) ||
        (w.model_constraint == verdict.worst->model_constraint && w.excess > verdict.worst->excess)) {
      verdict.worst = std::move(w);
    }
  };
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t a = 0; a < n; ++a) {
      if (a == p) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (b == p) continue;
        for (std::size_t c = b + 1; c < n; ++c) {
          if (c == p) continue;
          ++verdict.quadruples_checked;
          QuadrupleWitness w{p, a, b, c, 0.0, 0.0, false, ""};
          try {
            w.angle_sum = comparison_angle(k, space.d(a, b), space.d(p, a), space.d(p, b)) +
                          comparison_angle(k, space.d(b, c), space.d(p, b), space.d(p, c)) +
                          comparison_angle(k, space.d(a, c), space.d(p, a), space.d(p, c));
            w.excess = w.angle_sum - two_pi;
            const bool failing = w.excess > tol;
            if (failing || !verdict.worst || !verdict.worst->model_constraint) consider(std::move(w), failing);
          } catch (const ModelConstraintError& e) {
            w.model_constraint = true;
            w.excess = std::numeric_limits<double>::infinity();
            w.note = e.what();
            consider(std::move(w), true);
          }
        }
      }
    }
  }
  return verdict;
}

}  // namespace nullgeo
