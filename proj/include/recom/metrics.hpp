#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recom/partition.hpp"

namespace recom {

enum class LeanClass { SafeDem, SafeRep, Competitive };

std::string_view to_string(LeanClass c);

/// SafeDem above 0.55, SafeRep below 0.45, Competitive on [0.45, 0.55].
LeanClass classify_lean(double dem_share);

struct LeanCounts {
  int safe_dem = 0;
  int safe_rep = 0;
  int competitive = 0;

  friend bool operator==(const LeanCounts&, const LeanCounts&) = default;
};

struct IncumbentDistribution {
  int zero = 0;
  int single = 0;
  int multi = 0;
  double single_fraction = 0.0;
};

/// Scalar metrics of one chain state.
struct MetricRecord {
  std::int64_t step = 0;
  bool accepted = false;
  double single_incumbent_frac = 0.0;
  int districts_single_incumbent = 0;
  int districts_zero_incumbent = 0;
  int districts_multi_incumbent = 0;
  int town_splits = 0;
  double pop_deviation = 0.0;
  int majority_minority_count = 0;
  std::optional<LeanCounts> lean_counts;

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

/// (largest district pop - smallest) / ideal, ideal = total pop / districts.
double pop_deviation(const Plan& plan);

IncumbentDistribution incumbent_distribution(const Plan& plan);

/// Towns whose units occupy two or more districts (cached on the plan).
int town_splits(const Plan& plan);

/// From-scratch recount of town_splits straight from the assignment.
int count_town_splits(const Plan& plan);

enum class VapGroup { Minority, Hispanic, Black, Asian };

/// Districts whose group share of VAP strictly exceeds `threshold`. Minority
/// share is 1 - white / total. Throws ZeroVAPDistrict.
int majority_group_count(const Plan& plan, VapGroup group, double threshold);

inline int majority_minority_count(const Plan& plan, double threshold = 0.5) {
  return majority_group_count(plan, VapGroup::Minority, threshold);
}

struct PartisanLean {
  std::vector<double> dem_share;  // index d-1
  std::vector<LeanClass> lean;    // index d-1
  LeanCounts counts;
};

/// Two-party Democratic share per district. Throws ZeroVotesDistrict.
PartisanLean partisan_lean(const Plan& plan);

/// All metrics for one state. lean_counts is absent when the graph carries no votes.
MetricRecord compute_record(const Plan& plan, std::int64_t step, bool accepted);

/// One-line JSON (no trailing newline). Keys are stable; lean_counts is
/// omitted when absent.
std::string record_to_json(const MetricRecord& record);

/// Inverse of record_to_json. Throws MalformedFile / SchemaViolation.
MetricRecord record_from_json(std::string_view line);

}  // namespace recom
