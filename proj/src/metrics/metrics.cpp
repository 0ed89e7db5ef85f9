#include <algorithm>
#include <limits>

#include <json.hpp>

#include "recom/error.hpp"
#include "recom/metrics.hpp"

namespace recom {

using nlohmann::json;

std::string_view to_string(LeanClass c) {
  switch (c) {
    case LeanClass::SafeDem: return "safe_dem";
    case LeanClass::SafeRep: return "safe_rep";
    case LeanClass::Competitive: return "competitive";
  }
  return "competitive";
}

LeanClass classify_lean(double dem_share) {
  if (dem_share > 0.55) return LeanClass::SafeDem;
  if (dem_share < 0.45) return LeanClass::SafeRep;
  return LeanClass::Competitive;
}

double pop_deviation(const Plan& plan) {
  const int n = plan.num_districts();
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  std::int64_t total = 0;
  for (int d = 1; d <= n; ++d) {
    const auto pop = plan.aggregates(d).pop;
    lo = std::min(lo, pop);
    hi = std::max(hi, pop);
    total += pop;
  }
  if (total == 0) return 0.0;
  const double ideal = static_cast<double>(total) / n;
  return static_cast<double>(hi - lo) / ideal;
}

IncumbentDistribution incumbent_distribution(const Plan& plan) {
  IncumbentDistribution out;
  const int n = plan.num_districts();
  for (int d = 1; d <= n; ++d) {
    const int count = plan.aggregates(d).incumbent_count;
    if (count == 0)
      ++out.zero;
    else if (count == 1)
      ++out.single;
    else
      ++out.multi;
  }
  out.single_fraction = static_cast<double>(out.single) / n;
  return out;
}

int town_splits(const Plan& plan) { return plan.split_town_count(); }

int count_town_splits(const Plan& plan) {
  const DualGraph& g = plan.graph();
  int splits = 0;
  for (std::size_t t = 0; t < g.num_towns(); ++t) {
    auto members = g.town_members(static_cast<int>(t));
    const int first = plan.district_of(members.front());
    if (std::any_of(members.begin(), members.end(), [&](int u) { return plan.district_of(u) != first; }))
      ++splits;
  }
  return splits;
}

int majority_group_count(const Plan& plan, VapGroup group, double threshold) {
  int count = 0;
  for (int d = 1; d <= plan.num_districts(); ++d) {
    const Aggregates& a = plan.aggregates(d);
    if (a.vap_total <= 0) throw Error(ErrorKind::ZeroVAPDistrict, std::to_string(d), {}, {d});
    const double total = static_cast<double>(a.vap_total);
    double share = 0.0;
    switch (group) {
      case VapGroup::Minority: share = 1.0 - static_cast<double>(a.vap_white) / total; break;
      case VapGroup::Hispanic: share = static_cast<double>(a.vap_hispanic) / total; break;
      case VapGroup::Black: share = static_cast<double>(a.vap_black) / total; break;
      case VapGroup::Asian: share = static_cast<double>(a.vap_asian) / total; break;
    }
    if (share > threshold) ++count;
  }
  return count;
}

PartisanLean partisan_lean(const Plan& plan) {
  PartisanLean out;
  const int n = plan.num_districts();
  out.dem_share.reserve(static_cast<std::size_t>(n));
  out.lean.reserve(static_cast<std::size_t>(n));
  for (int d = 1; d <= n; ++d) {
    const Aggregates& a = plan.aggregates(d);
    const double two_party = a.dem_votes + a.rep_votes;
    if (!(two_party > 0.0)) throw Error(ErrorKind::ZeroVotesDistrict, std::to_string(d), {}, {d});
    const double share = a.dem_votes / two_party;
    const LeanClass c = classify_lean(share);
    out.dem_share.push_back(share);
    out.lean.push_back(c);
    switch (c) {
      case LeanClass::SafeDem: ++out.counts.safe_dem; break;
      case LeanClass::SafeRep: ++out.counts.safe_rep; break;
      case LeanClass::Competitive: ++out.counts.competitive; break;
    }
  }
  return out;
}

MetricRecord compute_record(const Plan& plan, std::int64_t step, bool accepted) {
  MetricRecord r;
  r.step = step;
  r.accepted = accepted;
  const auto inc = incumbent_distribution(plan);
  r.single_incumbent_frac = inc.single_fraction;
  r.districts_single_incumbent = inc.single;
  r.districts_zero_incumbent = inc.zero;
  r.districts_multi_incumbent = inc.multi;
  r.town_splits = town_splits(plan);
  r.pop_deviation = pop_deviation(plan);
  r.majority_minority_count = majority_minority_count(plan);
  if (plan.graph().total_votes() > 0.0) r.lean_counts = partisan_lean(plan).counts;
  return r;
}

std::string record_to_json(const MetricRecord& r) {
  json j = json::object();
  j["step"] = r.step;
  j["accepted"] = r.accepted;
  j["single_incumbent_frac"] = r.single_incumbent_frac;
  j["districts_single_incumbent"] = r.districts_single_incumbent;
  j["districts_zero_incumbent"] = r.districts_zero_incumbent;
  j["districts_multi_incumbent"] = r.districts_multi_incumbent;
  j["town_splits"] = r.town_splits;
  j["pop_deviation"] = r.pop_deviation;
  j["majority_minority_count"] = r.majority_minority_count;
  if (r.lean_counts)
    j["lean_counts"] = {{"safe_dem", r.lean_counts->safe_dem},
                        {"safe_rep", r.lean_counts->safe_rep},
                        {"competitive", r.lean_counts->competitive}};
  return j.dump();
}

MetricRecord record_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::MalformedFile, "metric record", e.what());
  }
  try {
    MetricRecord r;
    r.step = j.at("step").get<std::int64_t>();
    r.accepted = j.at("accepted").get<bool>();
    r.single_incumbent_frac = j.at("single_incumbent_frac").get<double>();
    r.districts_single_incumbent = j.at("districts_single_incumbent").get<int>();
    r.districts_zero_incumbent = j.at("districts_zero_incumbent").get<int>();
    r.districts_multi_incumbent = j.at("districts_multi_incumbent").get<int>();
    r.town_splits = j.at("town_splits").get<int>();
    r.pop_deviation = j.at("pop_deviation").get<double>();
    r.majority_minority_count = j.at("majority_minority_count").get<int>();
    if (auto it = j.find("lean_counts"); it != j.end())
      r.lean_counts = LeanCounts{it->at("safe_dem").get<int>(), it->at("safe_rep").get<int>(),
                                 it->at("competitive").get<int>()};
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, "metric record", e.what());
  }
}

}  // namespace recom
