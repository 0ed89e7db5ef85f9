#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "recom/partition.hpp"

namespace recom {

struct TownRollup {
  int town = 0;
  int units = 0;
  std::int64_t pop = 0;
  bool whole = false;  // the change set holds every unit of the town
};

struct ChangeSet {
  std::vector<int> units;  // ascending unit indices
  std::int64_t pop = 0;
  double dem_votes = 0.0;
  double rep_votes = 0.0;
  std::vector<TownRollup> towns;  // sorted by town index

  bool empty() const noexcept { return units.empty(); }
};

struct DistrictDiff {
  int district = 0;
  ChangeSet additions;
  ChangeSet subtractions;

  bool empty() const noexcept { return additions.empty() && subtractions.empty(); }
};

/// Per-district changes from `old` to `new`; districts[d-1] describes label d.
struct PlanDiff {
  std::vector<DistrictDiff> districts;

  const DistrictDiff& district(int d) const { return districts.at(static_cast<std::size_t>(d - 1)); }
};

/// Label correspondence by shared id. Throws GraphMismatch when the plans do
/// not share a unit set.
PlanDiff diff_plans(const Plan& old_plan, const Plan& new_plan);

/// Same, after renaming new-plan labels through `new_to_old` (index = new label).
PlanDiff diff_plans(const Plan& old_plan, const Plan& new_plan, const std::vector<int>& new_to_old);

/// Greedy max-population-overlap matching of new labels to old labels. Pairs
/// are taken in decreasing overlap (ties: lower old, then lower new label);
/// leftovers are paired in ascending order. Index 0 is unused.
std::vector<int> match_by_overlap(const Plan& old_plan, const Plan& new_plan);

enum class ChangeClass { Benefit, Disadvantage, Neutral, InsufficientData };

std::string_view to_string(ChangeClass c);

/// Vote-weighted net effect of a district's changes for `incumbent_party`:
/// ((s_add - 0.5) V_add - (s_rem - 0.5) V_rem) / (V_add + V_rem), with s the
/// party's two-party share and V the two-party votes of each change set.
/// Throws NoVotesOnChangedUnits when the diff is nonempty but carries no votes.
double change_effect(const DistrictDiff& diff, Party incumbent_party);

/// Benefit above `neutral_band`, Disadvantage below -neutral_band, else
/// Neutral; empty diffs are Neutral and a party of Other is InsufficientData.
/// Throws NoVotesOnChangedUnits.
ChangeClass classify_change(const DistrictDiff& diff, Party incumbent_party, double neutral_band = 0.02);

struct BorderFlag {
  int district = 0;
  IncumbentRef incumbent;
  std::vector<Edge> offending_edges;  // unit-index edges, ascending
};

/// Incumbents whose home unit touches a district border that is not also a
/// town border. Ordered by home unit, then incumbent order within the unit.
std::vector<BorderFlag> flag_borders(const Plan& plan);

std::string diff_to_json(const DualGraph& graph, const PlanDiff& diff, int indent = 2);
std::string borders_to_json(const Plan& plan, const std::vector<BorderFlag>& flags, int indent = 2);

}  // namespace recom
