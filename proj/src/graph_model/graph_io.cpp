#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "recom/error.hpp"
#include "recom/graph_model.hpp"

namespace recom {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, path.string(), "read failed");
  return buf.str();
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorKind::SchemaViolation, where, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t require_count(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer())
    throw Error(ErrorKind::SchemaViolation, where, std::string("field '") + key + "' must be an integer");
  if (v.is_number_unsigned()) {
    auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX))
      throw Error(ErrorKind::SchemaViolation, where, std::string("field '") + key + "' out of range");
    return static_cast<std::int64_t>(u);
  }
  auto x = v.get<std::int64_t>();
  if (x < 0)
    throw Error(ErrorKind::SchemaViolation, where, std::string("negative count in '") + key + "'");
  return x;
}

double require_tally(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number())
    throw Error(ErrorKind::SchemaViolation, where, std::string("field '") + key + "' must be a number");
  double x = v.get<double>();
  if (!(x >= 0.0))
    throw Error(ErrorKind::SchemaViolation, where, std::string("negative tally in '") + key + "'");
  return x;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string())
    throw Error(ErrorKind::SchemaViolation, where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Unit parse_unit(const json& ju, std::size_t position) {
  const std::string pos_name = "units[" + std::to_string(position) + "]";
  if (!ju.is_object()) throw Error(ErrorKind::SchemaViolation, pos_name, "unit must be an object");
  Unit u;
  u.id = require_string(ju, "id", pos_name);
  const std::string& where = u.id;
  u.pop = require_count(ju, "pop", where);
  u.vap_total = require_count(ju, "vap_total", where);
  u.vap_white = require_count(ju, "vap_white", where);
  u.vap_hispanic = require_count(ju, "vap_hispanic", where);
  u.vap_black = require_count(ju, "vap_black", where);
  u.vap_asian = require_count(ju, "vap_asian", where);
  u.town = require_string(ju, "town", where);
  u.dem_votes = require_tally(ju, "dem_votes", where);
  u.rep_votes = require_tally(ju, "rep_votes", where);
  const json& incs = require(ju, "incumbents", where);
  if (!incs.is_array()) throw Error(ErrorKind::SchemaViolation, where, "'incumbents' must be an array");
  for (const auto& ji : incs) {
    if (!ji.is_object()) throw Error(ErrorKind::SchemaViolation, where, "incumbent must be an object");
    IncumbentRef inc;
    inc.name = require_string(ji, "name", where);
    auto party = party_from_code(require_string(ji, "party", where));
    if (!party) throw Error(ErrorKind::SchemaViolation, where, "party must be one of D, R, O");
    inc.party = *party;
    inc.home_unit = require_string(ji, "home_unit", where);
    u.incumbents.push_back(std::move(inc));
  }
  return u;
}

}  // namespace

DualGraph parse_graph_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedFile, "graph", e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::SchemaViolation, "graph", "top level must be an object");
  const json& ju = require(doc, "units", "graph");
  const json& je = require(doc, "edges", "graph");
  if (!ju.is_array()) throw Error(ErrorKind::SchemaViolation, "units", "must be an array");
  if (!je.is_array()) throw Error(ErrorKind::SchemaViolation, "edges", "must be an array");

  std::vector<Unit> units;
  units.reserve(ju.size());
  for (std::size_t i = 0; i < ju.size(); ++i) units.push_back(parse_unit(ju[i], i));

  std::vector<EdgeSpec> edges;
  edges.reserve(je.size());
  for (std::size_t i = 0; i < je.size(); ++i) {
    const auto& e = je[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw Error(ErrorKind::SchemaViolation, "edges[" + std::to_string(i) + "]",
                  "edge must be a pair of unit ids");
    edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
  }
  return DualGraph::build(std::move(units), edges);
}

GraphPtr load_graph(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return std::make_shared<const DualGraph>(parse_graph_json(text));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedFile)
      throw Error(ErrorKind::MalformedFile, path.string(), e.what());
    throw;
  }
}

std::string graph_to_json(const DualGraph& graph, int indent) {
  json units = json::array();
  for (const auto& u : graph.units()) {
    json incs = json::array();
    for (const auto& inc : u.incumbents)
      incs.push_back({{"name", inc.name}, {"party", party_code(inc.party)}, {"home_unit", inc.home_unit}});
    units.push_back({{"id", u.id},
                     {"pop", u.pop},
                     {"vap_total", u.vap_total},
                     {"vap_white", u.vap_white},
                     {"vap_hispanic", u.vap_hispanic},
                     {"vap_black", u.vap_black},
                     {"vap_asian", u.vap_asian},
                     {"town", u.town},
                     {"dem_votes", u.dem_votes},
                     {"rep_votes", u.rep_votes},
                     {"incumbents", std::move(incs)}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges()) edges.push_back({graph.unit(e.u).id, graph.unit(e.v).id});
  json doc;
  doc["units"] = std::move(units);
  doc["edges"] = std::move(edges);
  return doc.dump(indent);
}

// ---- assignment CSV ----

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Assignment parse_assignment_csv(std::string_view text, const DualGraph& graph) {
  Assignment labels(graph.num_units(), 0);
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "unit_id,district")
        throw Error(ErrorKind::MalformedFile, "assignment", "expected header 'unit_id,district'");
      header_seen = true;
      continue;
    }
    auto comma = line.rfind(',');
    if (comma == std::string_view::npos)
      throw Error(ErrorKind::MalformedFile, "line " + std::to_string(line_no), "expected two columns");
    std::string_view id = trim(line.substr(0, comma));
    std::string_view label_text = trim(line.substr(comma + 1));
    int label = 0;
    auto [ptr, ec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (ec != std::errc{} || ptr != label_text.data() + label_text.size())
      throw Error(ErrorKind::MalformedFile, "line " + std::to_string(line_no),
                  "district '" + std::string(label_text) + "' is not an integer");
    if (label <= 0)
      throw Error(ErrorKind::SchemaViolation, std::string(id), "district label must be positive");
    auto idx = graph.index_of(id);
    if (!idx) throw Error(ErrorKind::UnknownUnit, std::string(id));
    auto& slot = labels[static_cast<std::size_t>(*idx)];
    if (slot != 0) throw Error(ErrorKind::SchemaViolation, std::string(id), "unit assigned twice");
    slot = label;
  }
  if (!header_seen) throw Error(ErrorKind::MalformedFile, "assignment", "empty file");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 0) throw Error(ErrorKind::UnassignedUnit, graph.unit(static_cast<int>(i)).id);
  return labels;
}

Assignment read_assignment(const std::filesystem::path& path, const DualGraph& graph) {
  const std::string text = read_file(path);
  try {
    return parse_assignment_csv(text, graph);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedFile)
      throw Error(ErrorKind::MalformedFile, path.string(), e.what());
    throw;
  }
}

std::string assignment_to_csv(const DualGraph& graph, const Assignment& assignment) {
  std::string out = "unit_id,district\n";
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out += graph.unit(static_cast<int>(i)).id;
    out += ',';
    out += std::to_string(assignment[i]);
    out += '\n';
  }
  return out;
}

}  // namespace recom
