#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace recom {

enum class Party { Dem, Rep, Other };

std::string_view party_code(Party p);  // "D", "R", "O"
std::optional<Party> party_from_code(std::string_view code);

struct IncumbentRef {
  std::string name;
  Party party = Party::Other;
  std::string home_unit;

  friend bool operator==(const IncumbentRef&, const IncumbentRef&) = default;
};

/// One geographic unit (block, block group, precinct or town piece).
struct Unit {
  std::string id;
  std::int64_t pop = 0;
  std::int64_t vap_total = 0;
  std::int64_t vap_white = 0;
  std::int64_t vap_hispanic = 0;
  std::int64_t vap_black = 0;
  std::int64_t vap_asian = 0;
  std::string town;
  double dem_votes = 0.0;
  double rep_votes = 0.0;
  std::vector<IncumbentRef> incumbents;

  friend bool operator==(const Unit&, const Unit&) = default;
};

/// Undirected edge between unit indices, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeSpec {
  std::string a;
  std::string b;
};

/// Immutable, validated dual graph. Shared read-only between plans and chains.
class DualGraph {
 public:
  struct Neighbor {
    int unit;
    int edge;
  };

  /// Validates every invariant eagerly and throws recom::Error on the first
  /// violation: DuplicateUnitId, SchemaViolation, DanglingEdge (self-loops and
  /// duplicate edges are reported as SchemaViolation), DisconnectedGraph.
  static DualGraph build(std::vector<Unit> units, std::span<const EdgeSpec> edges);

  std::size_t num_units() const noexcept { return units_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const Unit& unit(int u) const { return units_[static_cast<std::size_t>(u)]; }
  std::span<const Unit> units() const noexcept { return units_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(int u) const;
  std::optional<int> index_of(std::string_view id) const;

  std::size_t num_towns() const noexcept { return town_names_.size(); }
  int town_of(int u) const { return unit_town_[static_cast<std::size_t>(u)]; }
  const std::string& town_name(int t) const { return town_names_[static_cast<std::size_t>(t)]; }
  std::span<const int> town_members(int t) const { return town_members_[static_cast<std::size_t>(t)]; }

  std::int64_t total_pop() const noexcept { return total_pop_; }
  double total_votes() const noexcept { return total_votes_; }
  std::size_t total_incumbents() const noexcept { return total_incumbents_; }

 private:
  DualGraph() = default;

  std::vector<Unit> units_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> adj_offsets_;
  std::vector<Neighbor> adj_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> town_names_;
  std::vector<int> unit_town_;
  std::vector<std::vector<int>> town_members_;
  std::int64_t total_pop_ = 0;
  double total_votes_ = 0.0;
  std::size_t total_incumbents_ = 0;
};

using GraphPtr = std::shared_ptr<const DualGraph>;

/// Parses Graph JSON text. Syntax errors raise MalformedFile; structural
/// problems raise SchemaViolation or one of the graph invariant errors.
DualGraph parse_graph_json(std::string_view text);

/// Reads and parses a Graph JSON file. A missing or unreadable file raises Io.
GraphPtr load_graph(const std::filesystem::path& path);

/// Serializes a graph back to Graph JSON (units in index order, edges sorted).
std::string graph_to_json(const DualGraph& graph, int indent = -1);

/// District label per unit index, as read from an assignment CSV.
using Assignment = std::vector<int>;

/// Parses `unit_id,district` CSV text against a graph. Errors: MalformedFile,
/// UnknownUnit, UnassignedUnit, SchemaViolation (duplicate row, nonpositive label).
Assignment parse_assignment_csv(std::string_view text, const DualGraph& graph);
Assignment read_assignment(const std::filesystem::path& path, const DualGraph& graph);

std::string assignment_to_csv(const DualGraph& graph, const Assignment& assignment);

/// Whole-file read; raises Io naming the path.
std::string read_file(const std::filesystem::path& path);

}  // namespace recom
