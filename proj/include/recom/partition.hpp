#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "recom/graph_model.hpp"

namespace recom {

/// Per-district sums over member units.
struct Aggregates {
  std::int64_t pop = 0;
  std::int64_t vap_total = 0;
  std::int64_t vap_white = 0;
  std::int64_t vap_hispanic = 0;
  std::int64_t vap_black = 0;
  std::int64_t vap_asian = 0;
  double dem_votes = 0.0;
  double rep_votes = 0.0;
  int incumbent_count = 0;
  std::vector<IncumbentRef> incumbents;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

/// Recombination of two districts: the union of their units is reassigned
/// to `new_a` (label district_a) and `new_b` (label district_b).
struct RecomMove {
  int district_a = 0;
  int district_b = 0;
  std::vector<int> new_a;
  std::vector<int> new_b;
  Edge cut_edge;
};

/// Number of units a district holds inside one town.
struct TownShare {
  int district;
  int units;

  friend bool operator==(const TownShare&, const TownShare&) = default;
};

/// Immutable districting plan over a shared DualGraph. Successor plans are
/// produced by apply_recom_move; every Plan satisfies totality, nonempty and
/// contiguous districts, and cached aggregates/cut edges equal to a rebuild.
class Plan {
 public:
  const DualGraph& graph() const noexcept { return *graph_; }
  const GraphPtr& graph_ptr() const noexcept { return graph_; }

  int num_districts() const noexcept { return static_cast<int>(aggs_.size()); }
  int district_of(int unit) const { return assignment_[static_cast<std::size_t>(unit)]; }
  const Assignment& assignment() const noexcept { return assignment_; }

  /// Districts are labelled 1..num_districts().
  const Aggregates& aggregates(int district) const { return aggs_[static_cast<std::size_t>(district - 1)]; }
  std::span<const int> members(int district) const { return members_[static_cast<std::size_t>(district - 1)]; }

  bool is_cut(int edge) const { return cut_[static_cast<std::size_t>(edge)] != 0; }
  std::size_t num_cut_edges() const noexcept { return num_cut_; }
  /// Indices of cut edges in ascending order.
  std::vector<int> cut_edges() const;

  /// Districts present in a town with their unit counts, sorted by district.
  std::span<const TownShare> town_shares(int town) const { return towns_[static_cast<std::size_t>(town)]; }
  /// Towns whose units lie in two or more districts (maintained incrementally).
  int split_town_count() const noexcept { return split_towns_; }

  friend bool operator==(const Plan& a, const Plan& b);

 private:
  friend Plan build_plan(GraphPtr graph, Assignment assignment);
  friend Plan apply_recom_move(const Plan& plan, const RecomMove& move);

  GraphPtr graph_;
  Assignment assignment_;
  std::vector<std::vector<int>> members_;
  std::vector<Aggregates> aggs_;
  std::vector<std::uint8_t> cut_;
  std::size_t num_cut_ = 0;
  std::vector<std::vector<TownShare>> towns_;
  int split_towns_ = 0;
};

/// Builds a plan from scratch. Labels must form 1..n with n the largest label.
/// Errors: EmptyDistrict (a label in 1..n unused), DiscontiguousDistrict,
/// SchemaViolation (assignment size mismatch or nonpositive label).
Plan build_plan(GraphPtr graph, Assignment assignment);

/// Reads an assignment CSV and builds the plan. Errors: UnassignedUnit,
/// UnknownUnit, LabelGap, DiscontiguousDistrict, plus CSV syntax errors.
Plan load_assignment(const std::filesystem::path& path, GraphPtr graph, int num_districts);
Plan plan_from_assignment(GraphPtr graph, Assignment assignment, int num_districts);

/// Successor plan after a recombination move. Only the two touched districts
/// are re-aggregated and re-checked for contiguity. Errors: InvalidMove,
/// DiscontiguousDistrict.
Plan apply_recom_move(const Plan& plan, const RecomMove& move);

/// Pairs (i, j), i < j, of districts joined by at least one cut edge, sorted.
std::vector<std::pair<int, int>> district_adjacency(const Plan& plan);

/// Sum of member-unit attributes, in ascending unit order.
Aggregates aggregate_units(const DualGraph& graph, std::span<const int> units);

}  // namespace recom
