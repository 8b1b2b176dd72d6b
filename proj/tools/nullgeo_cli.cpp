// Scenario runner. Reads a JSON scenario, dispatches to the library and writes
// CSV tables, report.json and manifest.json into the output directory.
//
// Exit status: 0 all checks passed, 1 an invariant check failed (the report is
// still written), 2 the scenario or an input file could not be parsed.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nullgeo/cone.hpp"
#include "nullgeo/convergence.hpp"
#include "nullgeo/curvature.hpp"
#include "nullgeo/error.hpp"
#include "nullgeo/io.hpp"
#include "nullgeo/lpls.hpp"
#include "nullgeo/metric_core.hpp"
#include "nullgeo/null_curve.hpp"

namespace fs = std::filesystem;
using namespace nullgeo;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Context {
  Json cfg;
  fs::path base;
  fs::path out;
  std::uint64_t seed = 42;
  std::optional<std::size_t> n_t;
  std::optional<double> tol;
  Json report = Json::object();
  bool pass = true;
};

Json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

std::ofstream open_out(const Context& ctx, const std::string& name) {
  std::ofstream out(ctx.out / name, std::ios::binary);
  if (!out) throw InputError("cannot write " + (ctx.out / name).string());
  return out;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
}

double tol_or(const Context& ctx, double fallback) {
  if (ctx.tol) return *ctx.tol;
  return ctx.cfg.value("tol", fallback);
}

std::size_t n_t_or(const Context& ctx, const Json& j) {
  if (ctx.n_t) return *ctx.n_t;
  return j.value("n_t", kDefaultNt);
}

Interval interval_of(const Json& j) {
  const auto ab = j.at("interval").get<std::vector<double>>();
  if (ab.size() != 2) throw InputError("interval must be [a, b]");
  return {ab[0], ab[1]};
}

ConeGrid cone_of(const Context& ctx, const Json& j) {
  Json c = j;
  c["n_t"] = n_t_or(ctx, j);
  return cone_from_json(c, ctx.base);
}

std::vector<std::string> cone_ids(const ConeGrid& grid) {
  std::vector<std::string> ids;
  ids.reserve(grid.size());
  for (std::size_t v = 0; v < grid.size(); ++v) {
    const ConePoint p = grid.point(v);
    ids.push_back(std::to_string(p.level) + ":" + grid.fiber().ids()[p.fiber]);
  }
  return ids;
}

std::size_t fiber_index(const FiniteLengthSpace& fiber, const Json& x) {
  if (x.is_number_unsigned()) {
    const auto k = x.get<std::size_t>();
    if (k >= fiber.size()) throw InputError("fiber index out of range");
    return k;
  }
  const auto id = x.get<std::string>();
  for (std::size_t k = 0; k < fiber.size(); ++k) {
    if (fiber.ids()[k] == id) return k;
  }
  throw InputError("unknown fiber point '" + id + "'");
}

// {"t": value, "x": index or id} as a grid index.
std::size_t cone_point(const ConeGrid& grid, const Json& p) {
  return grid.index(grid.level_of(p.at("t").get<double>()), fiber_index(grid.fiber(), p.at("x")));
}

std::vector<std::size_t> row_sources(const Context& ctx, const ConeGrid& grid) {
  const std::size_t full_limit = ctx.cfg.value("full_matrix_limit", std::size_t{1024});
  if (grid.size() <= full_limit) return sample_sources(grid.size(), grid.size(), ctx.seed);
  return sample_sources(grid.size(), ctx.cfg.value("max_rows", std::size_t{64}), ctx.seed);
}

void write_rows(const Context& ctx, const std::string& name, const ConeGrid& grid,
                const std::vector<std::size_t>& sources, const std::vector<std::vector<double>>& rows) {
  const auto ids = cone_ids(grid);
  std::vector<std::string> row_ids;
  RealMatrix values(sources.size(), grid.size());
  for (std::size_t k = 0; k < sources.size(); ++k) {
    row_ids.push_back(ids[sources[k]]);
    std::copy(rows[k].begin(), rows[k].end(), values.row(k).begin());
  }
  auto out = open_out(ctx, name);
  write_long_csv(out, row_ids, ids, values);
}

Json pair_values(const Context& ctx, const ConeGrid& grid, const std::function<double(std::size_t, std::size_t)>& value) {
  Json pairs = Json::array();
  if (!ctx.cfg.contains("pairs")) return pairs;
  for (const auto& pq : ctx.cfg.at("pairs")) {
    const std::size_t p = cone_point(grid, pq.at("p"));
    const std::size_t q = cone_point(grid, pq.at("q"));
    Json e;
    e["p"] = pq.at("p");
    e["q"] = pq.at("q");
    e["value"] = num(value(p, q));
    if (pq.contains("expected")) {
      const double expected = pq.at("expected").get<double>();
      const double rel = pq.value("rel_tol", 0.02);
      const bool ok = std::abs(value(p, q) - expected) <= rel * std::abs(expected);
      e["expected"] = expected;
      e["pass"] = ok;
    }
    pairs.push_back(e);
  }
  return pairs;
}

bool pairs_pass(const Json& pairs) {
  for (const auto& e : pairs) {
    if (e.contains("pass") && !e.at("pass").get<bool>()) return false;
  }
  return true;
}

Json issues_json(const ValidationReport& r) {
  Json a = Json::array();
  for (const auto& i : r.issues) a.push_back({{"code", i.code}, {"witness", i.indices}, {"message", i.message}});
  return a;
}

void write_issues(const Context& ctx, const ValidationReport& r) {
  auto out = open_out(ctx, "validate.csv");
  out << "code,witness,message\n";
  for (const auto& i : r.issues) {
    std::string w;
    for (std::size_t k = 0; k < i.indices.size(); ++k) w += (k ? " " : "") + std::to_string(i.indices[k]);
    std::string msg = i.message;
    for (char& ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out << i.code << ',' << w << ',' << msg << '\n';
  }
}

void cmd_validate(Context& ctx) {
  const Json& c = ctx.cfg;
  if (c.contains("metric_csv")) {
    const LabeledMatrix m = load_matrix_csv_raw(ctx.base / c.at("metric_csv").get<std::string>());
    const ValidationReport r = validate_metric(m.values);
    ctx.report["kind"] = "metric";
    ctx.report["issues"] = issues_json(r);
    write_issues(ctx, r);
    ctx.pass = r.ok();
  } else if (c.contains("edges_csv")) {
    const FiniteLengthSpace s = load_edge_list_csv(ctx.base / c.at("edges_csv").get<std::string>());
    const ValidationReport r = validate_metric(s.dist());
    ctx.report["kind"] = "edges";
    ctx.report["points"] = s.size();
    ctx.report["issues"] = issues_json(r);
    write_issues(ctx, r);
    ctx.pass = r.ok();
  } else if (c.contains("pls_file")) {
    const PreLengthDocument doc = pls_from_json(load_json(ctx.base / c.at("pls_file").get<std::string>()));
    const ValidationReport r = validate_pls(doc.space);
    ctx.report["kind"] = "pre-length space";
    ctx.report["issues"] = issues_json(r);
    write_issues(ctx, r);
    ctx.pass = r.ok();
    if (r.ok() && !doc.tau.empty()) {
      const Verdict tf = check_time_function(doc.space, doc.tau);
      ctx.report["time_function"] = {{"pass", tf.pass}, {"witness", tf.witness}, {"message", tf.message}};
      ctx.pass = ctx.pass && tf.pass;
      if (tf.pass) {
        const PropertyReport pr = properties_report(doc.space, doc.tau);
        Json checks = Json::array();
        for (const auto& ch : pr.checks) {
          checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"witness", ch.witness}, {"detail", ch.detail}});
        }
        ctx.report["properties"] = checks;
        ctx.pass = ctx.pass && pr.pass();
      }
    }
  } else {
    throw InputError("validate needs metric_csv, edges_csv or pls_file");
  }
}

void cmd_nulldist(Context& ctx) {
  const NullDistanceSolver solver(cone_of(ctx, ctx.cfg.at("cone")));
  const ConeGrid& grid = solver.grid();
  const auto sources = row_sources(ctx, grid);
  std::vector<std::vector<double>> rows;
  solver.for_each_row(sources, [&](std::size_t, const std::vector<double>& r) { rows.push_back(r); });
  write_rows(ctx, "nulldist.csv", grid, sources, rows);
  const double upper_tol = tol_or(ctx, 2.0 * grid.dt() * std::max(1.0, grid.warping().f_max()));
  const BoundsReport b = check_null_distance_bounds(solver, sources, upper_tol);
  const Json pairs = pair_values(ctx, grid, [&](std::size_t p, std::size_t q) { return solver.row(p)[q]; });
  ctx.report["grid_points"] = grid.size();
  ctx.report["rows"] = sources.size();
  ctx.report["bounds"] = {{"pairs_checked", b.pairs_checked},     {"causal_max_error", num(b.causal_max_error)},
                          {"lower_violations", b.lower_violations}, {"max_upper_excess", num(b.max_upper_excess)},
                          {"upper_tol", upper_tol},                 {"zero_off_diagonal", b.zero_off_diagonal},
                          {"unreachable", b.unreachable},           {"pass", b.pass},
                          {"hint", b.hint}};
  ctx.report["pairs"] = pairs;
  ctx.pass = b.pass && pairs_pass(pairs);
}

void cmd_timesep(Context& ctx) {
  const TimeSeparationSolver solver(cone_of(ctx, ctx.cfg.at("cone")));
  const ConeGrid& grid = solver.grid();
  const auto sources = row_sources(ctx, grid);
  std::vector<std::vector<double>> rows;
  std::size_t positive_off_chrono = 0, unresolved = 0;
  for (std::size_t s : sources) {
    rows.push_back(solver.row(s));
    for (std::size_t v = 0; v < grid.size(); ++v) {
      const bool chrono = grid.relation(s, v) == CausalKind::Chronological;
      if (rows.back()[v] > 0.0 && !chrono) ++positive_off_chrono;
      if (rows.back()[v] == 0.0 && chrono) ++unresolved;
    }
  }
  write_rows(ctx, "timesep.csv", grid, sources, rows);
  const Json pairs = pair_values(ctx, grid, [&](std::size_t p, std::size_t q) { return solver.row(p)[q]; });
  ctx.report["grid_points"] = grid.size();
  ctx.report["rows"] = sources.size();
  ctx.report["positive_off_chronological"] = positive_off_chrono;
  ctx.report["chronological_unresolved_by_grid"] = unresolved;
  ctx.report["pairs"] = pairs;
  ctx.pass = positive_off_chrono == 0 && pairs_pass(pairs);
}

void cmd_nullcurve(Context& ctx) {
  const ConeGrid grid = cone_of(ctx, ctx.cfg.at("cone"));
  const Json& p = ctx.cfg.at("p");
  const Json& q = ctx.cfg.at("q");
  NullCurveOptions options;
  options.max_splits = ctx.cfg.value("max_splits", options.max_splits);
  const PiecewiseNullCurve curve = null_curve(grid, p.at("t").get<double>(), fiber_index(grid.fiber(), p.at("x")),
                                              q.at("t").get<double>(), fiber_index(grid.fiber(), q.at("x")), options);
  const NullCurveCheck check = check_null_curve(grid, curve);
  auto out = open_out(ctx, "nullcurve.csv");
  out << "s_begin,s_end,t_begin,t_end,u_begin,u_end,direction\n";
  for (const auto& s : curve.segments) {
    out << format_double(s.s_begin) << ',' << format_double(s.s_end) << ',' << format_double(s.t_begin) << ','
        << format_double(s.t_end) << ',' << format_double(s.u_begin) << ',' << format_double(s.u_end) << ','
        << s.direction << '\n';
  }
  std::vector<std::string> track;
  for (std::size_t k : curve.track) track.push_back(grid.fiber().ids()[k]);
  ctx.report["track"] = track;
  ctx.report["segments"] = curve.segments.size();
  ctx.report["check"] = {{"endpoint_t_error", check.endpoint_t_error}, {"endpoint_u_error", check.endpoint_u_error},
                         {"max_null_defect", check.max_null_defect},   {"null_length", check.null_length},
                         {"total_variation", check.total_variation},   {"pass", check.pass}};
  ctx.pass = check.pass;
}

std::vector<WarpingFunction> family_of(const Json& j, const Interval& iv) {
  std::vector<WarpingFunction> out;
  for (const auto& w : j) out.push_back(warping_from_json(w, iv));
  return out;
}

std::vector<std::string> labels_of(const Json& cfg, std::size_t n) {
  if (cfg.contains("labels")) return cfg.at("labels").get<std::vector<std::string>>();
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back("member " + std::to_string(k));
  return out;
}

void cmd_converge(Context& ctx) {
  const Json& c = ctx.cfg;
  const Interval iv = interval_of(c);
  const FiniteLengthSpace fiber = fiber_from_json(c.at("fiber"), ctx.base);
  const std::size_t n_t = n_t_or(ctx, c);
  auto members = family_of(c.at("family"), iv);
  WarpingSequence seq{members, labels_of(c, members.size()), warping_from_json(c.at("limit"), iv),
                      c.value("lower_bound", 0.0)};
  const std::size_t grid_size = (n_t + 1) * fiber.size();
  const auto sources = sample_sources(grid_size, c.value("max_rows", std::size_t{64}), ctx.seed);
  const ConvergenceReport r = null_convergence_check(seq, fiber, n_t, sources, c.value("deviation_tol", 0.0));
  auto out = open_out(ctx, "converge.csv");
  out << "label,eps,excluded,pairs,lower_violations,upper_violations,min_lower_margin,min_upper_margin,sup_deviation\n";
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    out << row.label << ',' << format_double(row.eps) << ',' << (row.excluded ? 1 : 0) << ',' << row.pairs << ','
        << row.lower_violations << ',' << row.upper_violations << ',' << format_double(row.min_lower_margin) << ','
        << format_double(row.min_upper_margin) << ',' << format_double(row.sup_deviation) << '\n';
    rows.push_back({{"label", row.label},
                    {"eps", row.eps},
                    {"excluded", row.excluded},
                    {"diagnostic", row.diagnostic},
                    {"pairs", row.pairs},
                    {"lower_violations", row.lower_violations},
                    {"upper_violations", row.upper_violations},
                    {"sup_deviation", row.sup_deviation}});
  }
  ctx.report["rows"] = rows;
  ctx.report["sandwich_holds"] = r.sandwich_holds;
  ctx.report["deviation_nonincreasing"] = r.deviation_nonincreasing;
  ctx.pass = r.sandwich_holds && r.deviation_nonincreasing;

  if (c.contains("isometry")) {
    const Json& iso = c.at("isometry");
    const NullDistanceSolver sf(ConeGrid(warping_from_json(iso.at("f"), iv), fiber, n_t));
    const NullDistanceSolver sn(ConeGrid(warping_from_json(iso.at("f_n"), iv), fiber, n_t));
    const std::size_t p0 = cone_point(sf.grid(), iso.at("p0"));
    const double radius = iso.at("r").get<double>();
    const double eps = iso.contains("eps") ? iso.at("eps").get<double>() : isometry_eps(sf, sn, radius, p0);
    const EpsilonIsometry e = epsilon_isometry(sf, sn, radius, p0, eps);
    ctx.report["isometry"] = {{"eps", e.eps},
                              {"domain", e.domain.size()},
                              {"codomain", e.codomain.size()},
                              {"reassigned", e.reassigned},
                              {"max_distortion", e.max_distortion},
                              {"net_radius", e.net_radius},
                              {"gh_bound", e.gh_bound},
                              {"pass", e.pass}};
    ctx.pass = ctx.pass && e.pass;
  }
}

Json correspondence_json(const Correspondence& r) {
  Json a = Json::array();
  for (auto [i, j] : r.pairs) a.push_back({i, j});
  return a;
}

void cmd_gh(Context& ctx) {
  const Json& c = ctx.cfg;
  const FiniteLengthSpace a = fiber_from_json(c.at("a"), ctx.base);
  const FiniteLengthSpace b = fiber_from_json(c.at("b"), ctx.base);
  const GHResult gh = gh_distance_exact(a, b, c.value("max_pairs", kMaxExactGHPairs));
  ctx.report["gh_distance"] = gh.distance;
  ctx.report["witness"] = correspondence_json(gh.witness);
  ctx.pass = true;
  if (c.contains("lift")) {
    const Json& lift = c.at("lift");
    const Interval iv = interval_of(lift);
    const std::size_t n_t = n_t_or(ctx, lift);
    const WarpingFunction one = WarpingFunction::constant(iv, 1.0);
    const ConeGrid ga(one, a, n_t), gb(one, b, n_t);
    auto out = open_out(ctx, "gh.csv");
    out << "correspondence,base_distortion,lifted_distortion\n";
    std::size_t worse = 0, k = 0;
    for (const auto& r : enumerate_correspondences(a.size(), b.size())) {
      const LiftedCorrespondence l = lift_correspondence(r, ga, gb);
      out << k++ << ',' << format_double(l.base_distortion) << ',' << format_double(l.lifted_distortion) << '\n';
      if (l.lifted_distortion > l.base_distortion + 1e-12) ++worse;
    }
    ctx.report["correspondences"] = k;
    ctx.report["lifted_worse_than_base"] = worse;
    ctx.pass = worse == 0;
  }
}

void cmd_net(Context& ctx) {
  const Json& c = ctx.cfg;
  const Interval iv = interval_of(c);
  const FiniteLengthSpace fiber = fiber_from_json(c.at("fiber"), ctx.base);
  const auto family = family_of(c.at("family"), iv);
  const NetCertificate cert = uniform_total_boundedness(family, labels_of(c, family.size()), c.at("C").get<double>(),
                                                        fiber, n_t_or(ctx, c), c.at("eps").get<double>());
  auto out = open_out(ctx, "net.csv");
  out << "label,status,achieved\n";
  for (std::size_t k = 0; k < cert.certified.size(); ++k) {
    out << cert.certified[k] << ",certified," << format_double(cert.achieved[k]) << '\n';
  }
  for (const auto& e : cert.excluded) out << e.substr(0, e.find(':')) << ",excluded,\n";
  ctx.report["t_net"] = cert.t_net;
  ctx.report["fiber_net"] = cert.fiber_net;
  ctx.report["net_points"] = cert.net_points.size();
  ctx.report["mesh_bound"] = cert.mesh_bound;
  ctx.report["excluded"] = cert.excluded;
  ctx.report["pass"] = cert.pass;
  ctx.pass = cert.pass;
}

BoundDirection direction_of(const Json& c) {
  const std::string d = c.value("direction", std::string("lower"));
  if (d == "lower") return BoundDirection::Lower;
  if (d == "upper") return BoundDirection::Upper;
  throw InputError("direction must be lower or upper");
}

Json witness_json(const ProbeWitness& w) {
  return {{"side_p", to_string(w.side_p)}, {"side_q", to_string(w.side_q)}, {"s_p", w.s_p},
          {"s_q", w.s_q},                  {"p", w.p},                      {"q", w.q},
          {"rho", w.rho},                  {"rho_model", w.rho_model},      {"margin", w.margin}};
}

void cmd_curvature(Context& ctx) {
  const Json& c = ctx.cfg;
  Json cone = c.at("cone");
  const ConeGrid base = cone_of(ctx, cone);
  const double step = c.value("fiber_step", 0.0);
  const bool graph = base.fiber().provenance() == Provenance::GraphInduced;
  const FiniteLengthSpace fiber = graph && step > 0.0 ? base.fiber().refined(step) : base.fiber();
  const TimeSeparationSolver solver(ConeGrid(base.warping(), fiber, base.n_t()));
  std::optional<TimeSeparationSolver> fine;
  if (graph) fine.emplace(ConeGrid(base.warping(), fiber.refined(0.5 * (step > 0.0 ? step : base.dt())), base.n_t()));
  const double k = c.value("K", 0.0);
  const auto direction = direction_of(c);
  const double tol = tol_or(ctx, 0.05);
  const TriangleSample sample = sample_timelike_triangles(solver, c.value("n_triangles", std::size_t{10}), ctx.seed, k,
                                                          c.value("side_cap", std::numeric_limits<double>::infinity()));
  auto out = open_out(ctx, "curvature.csv");
  out << "triangle,x,y,z,a,b,c,probes,violations,worst_margin,dp_error,pass\n";
  Json triangles = Json::array();
  bool all = !sample.triangles.empty();
  for (std::size_t i = 0; i < sample.triangles.size(); ++i) {
    const auto& t = sample.triangles[i];
    const CurvatureVerdict v = triangle_comparison(solver, fine ? &*fine : nullptr, t, k, direction,
                                                   c.value("n_probe", std::size_t{5}), tol);
    const double worst = v.worst ? v.worst->margin : 0.0;
    out << i << ',' << t.x << ',' << t.y << ',' << t.z << ',' << format_double(t.a) << ',' << format_double(t.b) << ','
        << format_double(t.c) << ',' << v.probes << ',' << v.violations << ',' << format_double(worst) << ','
        << format_double(v.dp_error) << ',' << (v.pass ? 1 : 0) << '\n';
    Json tj = {{"x", t.x}, {"y", t.y}, {"z", t.z}, {"a", t.a}, {"b", t.b}, {"c", t.c}, {"pass", v.pass},
               {"snap_error", v.snap_error}, {"dp_error", v.dp_error}, {"tolerance_ok", v.tolerance_ok}};
    if (v.worst) tj["worst"] = witness_json(*v.worst);
    triangles.push_back(tj);
    all = all && v.pass;
  }
  ctx.report["K"] = k;
  ctx.report["direction"] = to_string(direction);
  ctx.report["tol"] = tol;
  ctx.report["attempts"] = sample.attempts;
  ctx.report["filtered_size"] = sample.filtered_size;
  ctx.report["filtered_cap"] = sample.filtered_cap;
  ctx.report["diagnostic"] = sample.diagnostic;
  ctx.report["triangles"] = triangles;
  ctx.pass = all;
}

PersistenceMode mode_of(const std::string& m) {
  if (m == "product") return PersistenceMode::Product;
  if (m == "minkowski-cone") return PersistenceMode::MinkowskiCone;
  if (m == "warped") return PersistenceMode::Warped;
  throw InputError("mode must be product, minkowski-cone or warped");
}

void cmd_persist(Context& ctx) {
  const Json& c = ctx.cfg;
  PersistenceConfig config;
  config.mode = mode_of(c.at("mode").get<std::string>());
  config.k_prime = c.value("K_prime", 0.0);
  config.interval = interval_of(c);
  config.n_t = n_t_or(ctx, c);
  config.fiber_step = c.value("fiber_step", 0.0);
  config.n_triangles = c.value("n_triangles", config.n_triangles);
  config.n_probe = c.value("n_probe", config.n_probe);
  config.tol = tol_or(ctx, config.tol);
  config.quadruple_tol = c.value("quadruple_tol", config.quadruple_tol);
  config.side_cap = c.value("side_cap", config.side_cap);
  config.seed = ctx.seed;
  std::vector<FiniteLengthSpace> fibers;
  for (const auto& f : c.at("fibers")) fibers.push_back(fiber_from_json(f, ctx.base));
  const FiniteLengthSpace limit = fiber_from_json(c.at("limit"), ctx.base);
  std::vector<WarpingFunction> warpings;
  if (c.contains("warpings")) warpings = family_of(c.at("warpings"), config.interval);
  const PersistenceReport r = persistence_experiment(fibers, labels_of(c, fibers.size()), limit, warpings, config);
  auto out = open_out(ctx, "persist.csv");
  out << "label,quadruple_k,quadruple_pass,concavity_pass,K_n,triangle_K,triangles,triangle_pass,worst_margin,dp_error\n";
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    out << row.label << ',' << format_double(row.quadruple_k) << ',' << (row.quadruple_pass ? 1 : 0) << ','
        << (row.concavity_pass ? (*row.concavity_pass ? "1" : "0") : "") << ','
        << (row.k_n ? format_double(*row.k_n) : "") << ',' << format_double(row.triangle_k) << ',' << row.triangles
        << ',' << (row.triangle_pass ? 1 : 0) << ',' << format_double(row.worst_margin) << ','
        << format_double(row.dp_error) << '\n';
    rows.push_back({{"label", row.label},
                    {"quadruple_pass", row.quadruple_pass},
                    {"triangle_pass", row.triangle_pass},
                    {"triangles", row.triangles},
                    {"worst_margin", num(row.worst_margin)},
                    {"dp_error", row.dp_error},
                    {"diagnostic", row.diagnostic}});
  }
  ctx.report["mode"] = to_string(r.mode);
  ctx.report["rows"] = rows;
  ctx.report["consistent"] = r.consistent;
  ctx.report["diagnostic"] = r.diagnostic;
  bool all = r.consistent;
  for (const auto& row : r.rows) {
    const bool expected = c.value("expect_pass", true);
    if (row.triangles > 0 && row.triangle_pass != expected) all = false;
  }
  ctx.pass = all;
}

// File references found anywhere in the scenario, with a content digest.
void collect_inputs(const Json& j, const fs::path& base, Json& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const bool file_key = key.size() > 4 && (key.ends_with("_csv") || key.ends_with("file"));
      if (file_key && it.value().is_string()) {
        const fs::path p = base / it.value().get<std::string>();
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char ch : buf.str()) {
          h ^= ch;
          h *= 1099511628211ULL;
        }
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
        out.push_back({{"file", it.value()}, {"bytes", buf.str().size()}, {"fnv1a64", hex}});
      } else {
        collect_inputs(it.value(), base, out);
      }
    }
  } else if (j.is_array()) {
    for (const auto& e : j) collect_inputs(e, base, out);
  }
}

int run(Context& ctx) {
  const std::string command = ctx.cfg.at("command").get<std::string>();
  if (command == "validate") cmd_validate(ctx);
  else if (command == "nulldist") cmd_nulldist(ctx);
  else if (command == "timesep") cmd_timesep(ctx);
  else if (command == "nullcurve") cmd_nullcurve(ctx);
  else if (command == "converge") cmd_converge(ctx);
  else if (command == "gh") cmd_gh(ctx);
  else if (command == "net") cmd_net(ctx);
  else if (command == "curvature") cmd_curvature(ctx);
  else if (command == "persist") cmd_persist(ctx);
  else throw InputError("unknown command '" + command + "'");
  return ctx.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null distance and curvature experiments on generalized cones"};
  std::string config;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_t;
  std::optional<double> tol;
  app.add_option("--config", config, "JSON scenario")->required();
  app.add_option("--seed", seed, "random seed (overrides the scenario)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--n-t", n_t, "number of t-steps (overrides the scenario)");
  app.add_option("--tol", tol, "tolerance (overrides the scenario)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Context ctx;
  ctx.out = out_dir;
  ctx.n_t = n_t;
  ctx.tol = tol;
  Json manifest;
  try {
    const fs::path cfg_path(config);
    ctx.base = cfg_path.parent_path();
    ctx.cfg = load_json(cfg_path);
    if (!ctx.cfg.is_object() || !ctx.cfg.contains("command")) throw ParseError(config + ": scenario needs a command");
    ctx.seed = seed ? *seed : ctx.cfg.value("seed", std::uint64_t{42});
    fs::create_directories(ctx.out);
    Json inputs = Json::array();
    collect_inputs(ctx.cfg, ctx.base, inputs);
    manifest = {{"version", kVersion},
                {"command", ctx.cfg.at("command")},
                {"scenario", ctx.cfg},
                {"seed", ctx.seed},
                {"n_t_override", n_t ? Json(*n_t) : Json()},
                {"tol_override", tol ? Json(*tol) : Json()},
                {"inputs", inputs}};
    write_json(ctx.out / "manifest.json", manifest);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  int status = 0;
  try {
    status = run(ctx);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    ctx.report["error"] = e.what();
    status = 2;
  } catch (const Json::exception& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    ctx.report["error"] = e.what();
    status = 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    ctx.report["error"] = e.what();
    status = 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    ctx.report["error"] = e.what();
    status = 1;
  }
  Json report = {{"command", ctx.cfg.at("command")}, {"pass", status == 0}};
  for (auto it = ctx.report.begin(); it != ctx.report.end(); ++it) report[it.key()] = it.value();
  write_json(ctx.out / "report.json", report);
  std::cout << ctx.cfg.at("command").get<std::string>() << ": " << (status == 0 ? "pass" : "fail") << '\n';
  return status;
}
