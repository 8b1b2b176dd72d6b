#include "nullgeo/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "nullgeo/error.hpp"

namespace nullgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  for (auto& c : cells) {
    const auto lo = c.find_first_not_of(" \t");
    const auto hi = c.find_last_not_of(" \t");
    c = lo == std::string::npos ? std::string() : c.substr(lo, hi - lo + 1);
  }
  return cells;
}

std::string where(const std::string& source, std::size_t line, std::size_t column = 0) {
  std::string out = source + ":" + std::to_string(line);
  if (column > 0) out += ":" + std::to_string(column);
  return out;
}

double parse_number(const std::string& text, const std::string& location) {
  if (text == "inf" || text == "+inf") return kInf;
  if (text == "-inf") return -kInf;
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(location + ": expected a number, found '" + text + "'");
  }
  return value;
}

// Non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.emplace_back(number, line);
  }
  return lines;
}

std::ifstream open_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

RealMatrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of rows");
  const std::size_t n = j.size();
  RealMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) throw InputError(what + " must be square");
    for (std::size_t c = 0; c < n; ++c) {
      const Json& v = j[r][c];
      if (v.is_string()) {
        m(r, c) = parse_number(v.get<std::string>(), what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
      } else if (v.is_number()) {
        m(r, c) = v.get<double>();
      } else {
        throw InputError(what + " entries must be numbers");
      }
    }
  }
  return m;
}

BoolMatrix bool_matrix_from_json(const Json& j, const std::string& what) {
  const RealMatrix m = matrix_from_json(j, what);
  BoolMatrix out(m.rows(), m.cols(), false);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (v != 0.0 && v != 1.0) throw InputError(what + " entries must be 0 or 1");
      out(r, c) = v == 1.0;
    }
  }
  return out;
}

Json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

LabeledMatrix read_matrix_csv_raw(std::istream& in, const std::string& source) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw ParseError(source + ": empty matrix file");
  auto header = split(lines[0].second);
  if (!header.empty() && (header[0].empty() || header[0] == "id")) header.erase(header.begin());
  const std::size_t n = header.size();
  if (lines.size() != n + 1) {
    throw ParseError(where(source, lines.back().first) + ": expected " + std::to_string(n) + " matrix rows, found " +
                     std::to_string(lines.size() - 1));
  }
  RealMatrix d(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    auto cells = split(lines[r + 1].second);
    if (cells.size() == n + 1) {
      if (cells[0] != header[r]) {
        throw ParseError(where(source, lines[r + 1].first, 1) + ": row id '" + cells[0] + "' does not match header id '" +
                         header[r] + "'");
      }
      cells.erase(cells.begin());
    }
    if (cells.size() != n) {
      throw ParseError(where(source, lines[r + 1].first) + ": expected " + std::to_string(n) + " entries");
    }
    for (std::size_t c = 0; c < n; ++c) d(r, c) = parse_number(cells[c], where(source, lines[r + 1].first, c + 1));
  }
  return {std::move(header), std::move(d)};
}

LabeledMatrix load_matrix_csv_raw(const std::filesystem::path& path) {
  auto in = open_file(path);
  return read_matrix_csv_raw(in, path.string());
}

FiniteLengthSpace read_matrix_csv(std::istream& in, const std::string& source) {
  LabeledMatrix m = read_matrix_csv_raw(in, source);
  return FiniteLengthSpace(std::move(m.ids), std::move(m.values));
}

FiniteLengthSpace read_edge_list_csv(std::istream& in, const std::string& source) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw ParseError(source + ": empty edge list");
  const auto header = split(lines[0].second);
  if (header != std::vector<std::string>{"src", "dst", "weight"}) {
    throw ParseError(where(source, lines[0].first) + ": header must be src,dst,weight");
  }
  std::map<std::string, std::size_t> index;
  std::vector<std::string> ids;
  auto id_of = [&](const std::string& name) {
    auto [it, fresh] = index.emplace(name, ids.size());
    if (fresh) ids.push_back(name);
    return it->second;
  };
  std::vector<WeightedEdge> edges;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k].second);
    if (cells.size() != 3) throw ParseError(where(source, lines[k].first) + ": expected src,dst,weight");
    if (cells[0].empty() || cells[1].empty()) throw ParseError(where(source, lines[k].first) + ": empty vertex id");
    const double w = parse_number(cells[2], where(source, lines[k].first, 3));
    if (!(w > 0.0) || !std::isfinite(w)) throw ParseError(where(source, lines[k].first, 3) + ": weights must be positive");
    const std::size_t u = id_of(cells[0]);
    const std::size_t v = id_of(cells[1]);
    edges.push_back({u, v, w});
  }
  const std::size_t n = ids.size();
  return intrinsic_metric(edges, n, std::move(ids));
}

FiniteLengthSpace load_matrix_csv(const std::filesystem::path& path) {
  auto in = open_file(path);
  return read_matrix_csv(in, path.string());
}

FiniteLengthSpace load_edge_list_csv(const std::filesystem::path& path) {
  auto in = open_file(path);
  return read_edge_list_csv(in, path.string());
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& ids, const RealMatrix& dist) {
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t r = 0; r < dist.rows(); ++r) {
    out << ids[r];
    for (std::size_t c = 0; c < dist.cols(); ++c) out << ',' << format_double(dist(r, c));
    out << '\n';
  }
}

void write_long_csv(std::ostream& out, const std::vector<std::string>& row_ids,
                    const std::vector<std::string>& col_ids, const RealMatrix& values) {
  if (row_ids.size() != values.rows() || col_ids.size() != values.cols()) {
    throw InputError("id lists do not match the matrix shape");
  }
  out << "row_id,col_id,value\n";
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      out << row_ids[r] << ',' << col_ids[c] << ',' << format_double(values(r, c)) << '\n';
    }
  }
}

LongMatrix read_long_csv(std::istream& in, const std::string& source) {
  const auto lines = read_lines(in);
  if (lines.empty() || split(lines[0].second) != std::vector<std::string>{"row_id", "col_id", "value"}) {
    throw ParseError(source + ":1: header must be row_id,col_id,value");
  }
  LongMatrix out;
  std::map<std::string, std::size_t> rows, cols;
  std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k].second);
    if (cells.size() != 3) throw ParseError(where(source, lines[k].first) + ": expected row_id,col_id,value");
    auto [ri, rnew] = rows.emplace(cells[0], out.row_ids.size());
    if (rnew) out.row_ids.push_back(cells[0]);
    auto [ci, cnew] = cols.emplace(cells[1], out.col_ids.size());
    if (cnew) out.col_ids.push_back(cells[1]);
    entries.emplace_back(ri->second, ci->second, parse_number(cells[2], where(source, lines[k].first, 3)));
  }
  out.values = RealMatrix(out.row_ids.size(), out.col_ids.size(), std::numeric_limits<double>::quiet_NaN());
  for (auto [r, c, v] : entries) out.values(r, c) = v;
  if (entries.size() != out.row_ids.size() * out.col_ids.size()) {
    throw ParseError(source + ": long-form matrix is incomplete or has duplicate entries");
  }
  return out;
}

WarpingFunction warping_from_json(const Json& j, const Interval& fallback) {
  if (!j.is_object() || !j.contains("kind")) throw InputError("warping needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "tabulated") {
    return WarpingFunction::tabulated(j.at("t").get<std::vector<double>>(), j.at("f").get<std::vector<double>>());
  }
  Interval iv = fallback;
  if (j.contains("interval")) {
    const auto ab = j.at("interval").get<std::vector<double>>();
    if (ab.size() != 2) throw InputError("interval must be [a, b]");
    iv = {ab[0], ab[1]};
  }
  const auto p = j.contains("params") ? j.at("params").get<std::vector<double>>() : std::vector<double>{};
  auto need = [&](std::size_t n) {
    if (p.size() != n) throw InputError("warping kind '" + kind + "' takes " + std::to_string(n) + " params");
  };
  if (kind == "constant") {
    need(1);
    return WarpingFunction::constant(iv, p[0]);
  }
  if (kind == "affine") {
    need(2);
    return WarpingFunction::affine(iv, p[0], p[1]);
  }
  if (kind == "exponential") {
    need(2);
    return WarpingFunction::exponential(iv, p[0], p[1]);
  }
  if (kind == "cosh") {
    need(3);
    return WarpingFunction::cosh(iv, p[0], p[1], p[2]);
  }
  throw InputError("unknown warping kind '" + kind + "'");
}

Json warping_to_json(const WarpingFunction& f) {
  Json j;
  j["kind"] = to_string(f.kind());
  if (f.kind() == WarpingKind::Tabulated) {
    j["t"] = f.knots();
    j["f"] = f.params();
  } else {
    j["params"] = f.params();
    j["interval"] = {f.domain().a, f.domain().b};
  }
  return j;
}

FiniteLengthSpace fiber_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InputError("fiber must be an object");
  if (j.contains("matrix_csv")) return load_matrix_csv(base_dir / j.at("matrix_csv").get<std::string>());
  if (j.contains("edges_csv")) return load_edge_list_csv(base_dir / j.at("edges_csv").get<std::string>());
  if (j.contains("matrix")) {
    RealMatrix d = matrix_from_json(j.at("matrix"), "fiber matrix");
    if (j.contains("ids")) return FiniteLengthSpace(j.at("ids").get<std::vector<std::string>>(), std::move(d));
    return FiniteLengthSpace(std::move(d));
  }
  if (j.contains("path")) {
    const Json& p = j.at("path");
    return path_metric(p.at("n").get<std::size_t>(), p.value("length", 1.0));
  }
  if (j.contains("tripod")) {
    const Json& p = j.at("tripod");
    return tripod(p.at("leg_points").get<std::size_t>(), p.value("leg_length", 1.0));
  }
  throw InputError("fiber needs one of matrix_csv, edges_csv, matrix, path, tripod");
}

ConeGrid cone_from_json(const Json& j, const std::filesystem::path& base_dir) {
  const auto ab = j.at("interval").get<std::vector<double>>();
  if (ab.size() != 2) throw InputError("interval must be [a, b]");
  const Interval iv{ab[0], ab[1]};
  const std::size_t n_t = j.value("n_t", kDefaultNt);
  return ConeGrid(warping_from_json(j.at("warping"), iv), fiber_from_json(j.at("fiber"), base_dir), n_t);
}

PreLengthDocument pls_from_json(const Json& j) {
  PreLengthDocument doc;
  RealMatrix dist = matrix_from_json(j.at("dist"), "dist");
  std::vector<std::string> ids;
  if (j.contains("points")) {
    ids = j.at("points").get<std::vector<std::string>>();
  } else {
    for (std::size_t i = 0; i < dist.rows(); ++i) ids.push_back(std::to_string(i));
  }
  if (ids.size() != dist.rows()) throw InputError("points and dist disagree in size");
  doc.space.base = FiniteLengthSpace(std::move(ids), std::move(dist));
  doc.space.causal = bool_matrix_from_json(j.at("causal"), "causal");
  doc.space.chrono = bool_matrix_from_json(j.at("chrono"), "chrono");
  doc.space.rho = matrix_from_json(j.at("rho"), "rho");
  if (j.contains("tau")) doc.tau = j.at("tau").get<std::vector<double>>();
  return doc;
}

Json pls_to_json(const DiscretePreLengthSpace& space, const TimeFunction& tau) {
  Json j;
  j["points"] = space.base.ids();
  const std::size_t n = space.size();
  Json dist = Json::array(), causal = Json::array(), chrono = Json::array(), rho = Json::array();
  for (std::size_t r = 0; r < n; ++r) {
    Json dr = Json::array(), cr = Json::array(), hr = Json::array(), rr = Json::array();
    for (std::size_t c = 0; c < n; ++c) {
      dr.push_back(space.base.d(r, c));
      cr.push_back(space.causal(r, c) ? 1 : 0);
      hr.push_back(space.chrono(r, c) ? 1 : 0);
      rr.push_back(number_json(space.rho(r, c)));
    }
    dist.push_back(dr);
    causal.push_back(cr);
    chrono.push_back(hr);
    rho.push_back(rr);
  }
  j["dist"] = dist;
  j["causal"] = causal;
  j["chrono"] = chrono;
  j["rho"] = rho;
  if (!tau.empty()) j["tau"] = tau;
  return j;
}

Json load_json(const std::filesystem::path& path) {
  auto in = open_file(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(where(path.string(), line, column) + ": " + e.what());
  }
}

}  // namespace nullgeo
