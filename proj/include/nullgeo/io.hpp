#pragma once

// File formats: distance-matrix CSV, edge-list CSV, long-form matrix CSV and
// the JSON documents for warping functions, fibers, cones and discrete
// pre-length spaces.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullgeo/cone.hpp"
#include "nullgeo/lpls.hpp"
#include "nullgeo/metric_core.hpp"
#include "nullgeo/warping.hpp"

namespace nullgeo {

using Json = nlohmann::ordered_json;

// 17 significant digits; "inf" and "-inf" for infinities.
std::string format_double(double value);

struct LabeledMatrix {
  std::vector<std::string> ids;
  RealMatrix values;
};

// Header row of point ids, then one row per point: id followed by the
// distances. A first header cell named "id" (or empty) is skipped. The raw
// reader does not check the metric axioms.
LabeledMatrix read_matrix_csv_raw(std::istream& in, const std::string& source = "<matrix>");
LabeledMatrix load_matrix_csv_raw(const std::filesystem::path& path);
FiniteLengthSpace read_matrix_csv(std::istream& in, const std::string& source = "<matrix>");
// Header "src,dst,weight"; vertex ids in order of first appearance.
FiniteLengthSpace read_edge_list_csv(std::istream& in, const std::string& source = "<edges>");

FiniteLengthSpace load_matrix_csv(const std::filesystem::path& path);
FiniteLengthSpace load_edge_list_csv(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& ids, const RealMatrix& dist);

struct LongMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  RealMatrix values;
};

// row_id,col_id,value triples in row-major order.
void write_long_csv(std::ostream& out, const std::vector<std::string>& row_ids,
                    const std::vector<std::string>& col_ids, const RealMatrix& values);
LongMatrix read_long_csv(std::istream& in, const std::string& source = "<long>");

// {"kind": ..., "params": [...], "interval": [a, b]}; tabulated functions use
// {"kind": "tabulated", "t": [...], "f": [...]}.
WarpingFunction warping_from_json(const Json& j, const Interval& fallback = {});
Json warping_to_json(const WarpingFunction& f);

// One of {"matrix_csv": file}, {"edges_csv": file}, {"matrix": [[...]], "ids"?},
// {"path": {"n", "length"}}, {"tripod": {"leg_points", "leg_length"}}.
// File names are resolved against base_dir.
FiniteLengthSpace fiber_from_json(const Json& j, const std::filesystem::path& base_dir);

// {"interval": [a, b], "n_t", "fiber": {...}, "warping": {...}}.
ConeGrid cone_from_json(const Json& j, const std::filesystem::path& base_dir);

// {"points": [ids], "dist": [[...]], "causal": [[0/1]], "chrono": [[0/1]],
//  "rho": [[...]], "tau": [...]}; rho entries may be the string "inf".
struct PreLengthDocument {
  DiscretePreLengthSpace space;
  TimeFunction tau;  // empty when absent
};

PreLengthDocument pls_from_json(const Json& j);
Json pls_to_json(const DiscretePreLengthSpace& space, const TimeFunction& tau = {});

// Parses a JSON file; ParseError carries file:line:column.
Json load_json(const std::filesystem::path& path);

}  // namespace nullgeo
