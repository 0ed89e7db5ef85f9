#include <algorithm>
#include <map>
#include <tuple>

#include <json.hpp>

#include "recom/error.hpp"
#include "recom/plan_diff.hpp"

namespace recom {

namespace {

void require_same_graph(const Plan& a, const Plan& b) {
  if (a.graph_ptr() == b.graph_ptr()) return;
  const DualGraph& ga = a.graph();
  const DualGraph& gb = b.graph();
  if (ga.num_units() != gb.num_units())
    throw Error(ErrorKind::GraphMismatch, "plans", "unit counts differ");
  for (std::size_t i = 0; i < ga.num_units(); ++i)
    if (ga.unit(static_cast<int>(i)).id != gb.unit(static_cast<int>(i)).id)
      throw Error(ErrorKind::GraphMismatch, ga.unit(static_cast<int>(i)).id, "unit order differs");
}

void finish(ChangeSet& set, const DualGraph& g) {
  std::map<int, TownRollup> towns;
  for (int u : set.units) {
    const Unit& unit = g.unit(u);
    set.pop += unit.pop;
    set.dem_votes += unit.dem_votes;
    set.rep_votes += unit.rep_votes;
    auto& t = towns[g.town_of(u)];
    t.town = g.town_of(u);
    ++t.units;
    t.pop += unit.pop;
  }
  for (auto& [town, roll] : towns) {
    roll.whole = static_cast<std::size_t>(roll.units) == g.town_members(town).size();
    set.towns.push_back(roll);
  }
}

nlohmann::ordered_json change_json(const ChangeSet& set, const DualGraph& g) {
  nlohmann::ordered_json j;
  auto ids = nlohmann::ordered_json::array();
  for (int u : set.units) ids.push_back(g.unit(u).id);
  j["units"] = std::move(ids);
  j["pop"] = set.pop;
  j["dem_votes"] = set.dem_votes;
  j["rep_votes"] = set.rep_votes;
  auto towns = nlohmann::ordered_json::array();
  for (const auto& t : set.towns)
    towns.push_back({{"town", g.town_name(t.town)}, {"units", t.units}, {"pop", t.pop}, {"whole", t.whole}});
  j["towns"] = std::move(towns);
  return j;
}

nlohmann::ordered_json incumbent_json(const IncumbentRef& inc) {
  return {{"name", inc.name}, {"party", party_code(inc.party)}, {"home_unit", inc.home_unit}};
}

}  // namespace

PlanDiff diff_plans(const Plan& old_plan, const Plan& new_plan) {
  std::vector<int> identity(static_cast<std::size_t>(new_plan.num_districts() + 1));
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  return diff_plans(old_plan, new_plan, identity);
}

PlanDiff diff_plans(const Plan& old_plan, const Plan& new_plan, const std::vector<int>& new_to_old) {
  require_same_graph(old_plan, new_plan);
  if (new_to_old.size() != static_cast<std::size_t>(new_plan.num_districts() + 1))
    throw Error(ErrorKind::InvalidConfig, "label map", "size must be new district count + 1");
  const DualGraph& g = old_plan.graph();
  const int n = std::max(old_plan.num_districts(),
                         *std::max_element(new_to_old.begin() + 1, new_to_old.end()));
  PlanDiff diff;
  diff.districts.resize(static_cast<std::size_t>(n));
  for (int d = 1; d <= n; ++d) diff.districts[static_cast<std::size_t>(d - 1)].district = d;

  for (std::size_t u = 0; u < g.num_units(); ++u) {
    const int before = old_plan.district_of(static_cast<int>(u));
    const int after = new_to_old[static_cast<std::size_t>(new_plan.district_of(static_cast<int>(u)))];
    if (before == after) continue;
    diff.districts[static_cast<std::size_t>(after - 1)].additions.units.push_back(static_cast<int>(u));
    diff.districts[static_cast<std::size_t>(before - 1)].subtractions.units.push_back(static_cast<int>(u));
  }
  for (auto& d : diff.districts) {
    finish(d.additions, g);
    finish(d.subtractions, g);
  }
  return diff;
}

std::vector<int> match_by_overlap(const Plan& old_plan, const Plan& new_plan) {
  require_same_graph(old_plan, new_plan);
  const DualGraph& g = old_plan.graph();
  std::map<std::pair<int, int>, std::int64_t> overlap;  // (old, new) -> pop
  for (std::size_t u = 0; u < g.num_units(); ++u)
    overlap[{old_plan.district_of(static_cast<int>(u)), new_plan.district_of(static_cast<int>(u))}] +=
        g.unit(static_cast<int>(u)).pop;

  std::vector<std::tuple<std::int64_t, int, int>> pairs;
  for (const auto& [key, pop] : overlap) pairs.emplace_back(pop, key.first, key.second);
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  const int n_new = new_plan.num_districts();
  const int n_old = old_plan.num_districts();
  std::vector<int> map(static_cast<std::size_t>(n_new + 1), 0);
  std::vector<char> old_used(static_cast<std::size_t>(n_old + 1), 0);
  for (const auto& [pop, o, nw] : pairs) {
    if (map[static_cast<std::size_t>(nw)] != 0 || old_used[static_cast<std::size_t>(o)]) continue;
    map[static_cast<std::size_t>(nw)] = o;
    old_used[static_cast<std::size_t>(o)] = 1;
  }
  int next_old = 1;
  int fresh = n_old;
  for (int nw = 1; nw <= n_new; ++nw) {
    if (map[static_cast<std::size_t>(nw)] != 0) continue;
    while (next_old <= n_old && old_used[static_cast<std::size_t>(next_old)]) ++next_old;
    if (next_old <= n_old) {
      map[static_cast<std::size_t>(nw)] = next_old;
      old_used[static_cast<std::size_t>(next_old)] = 1;
    } else {
      map[static_cast<std::size_t>(nw)] = ++fresh;
    }
  }
  return map;
}

std::string_view to_string(ChangeClass c) {
  switch (c) {
    case ChangeClass::Benefit: return "benefit";
    case ChangeClass::Disadvantage: return "disadvantage";
    case ChangeClass::Neutral: return "neutral";
    case ChangeClass::InsufficientData: return "insufficient-data";
  }
  return "neutral";
}

double change_effect(const DistrictDiff& diff, Party party) {
  if (diff.empty()) return 0.0;
  auto votes = [](const ChangeSet& s) { return s.dem_votes + s.rep_votes; };
  auto share = [&](const ChangeSet& s) {
    const double v = votes(s);
    if (v <= 0.0) return 0.5;
    return (party == Party::Dem ? s.dem_votes : s.rep_votes) / v;
  };
  const double v_add = votes(diff.additions);
  const double v_rem = votes(diff.subtractions);
  if (!(v_add + v_rem > 0.0))
    throw Error(ErrorKind::NoVotesOnChangedUnits, std::to_string(diff.district), {}, {diff.district});
  return ((share(diff.additions) - 0.5) * v_add - (share(diff.subtractions) - 0.5) * v_rem) / (v_add + v_rem);
}

ChangeClass classify_change(const DistrictDiff& diff, Party party, double neutral_band) {
  if (diff.empty()) return ChangeClass::Neutral;
  if (party == Party::Other) return ChangeClass::InsufficientData;
  const double effect = change_effect(diff, party);
  if (effect > neutral_band) return ChangeClass::Benefit;
  if (effect < -neutral_band) return ChangeClass::Disadvantage;
  return ChangeClass::Neutral;
}

std::vector<BorderFlag> flag_borders(const Plan& plan) {
  const DualGraph& g = plan.graph();
  std::vector<BorderFlag> flags;
  for (std::size_t u = 0; u < g.num_units(); ++u) {
    const Unit& unit = g.unit(static_cast<int>(u));
    if (unit.incumbents.empty()) continue;
    std::vector<Edge> offending;
    for (const auto& nb : g.neighbors(static_cast<int>(u)))
      if (plan.is_cut(nb.edge) && g.town_of(nb.unit) == g.town_of(static_cast<int>(u)))
        offending.push_back(g.edges()[static_cast<std::size_t>(nb.edge)]);
    if (offending.empty()) continue;
    std::sort(offending.begin(), offending.end());
    for (const auto& inc : unit.incumbents)
      flags.push_back({plan.district_of(static_cast<int>(u)), inc, offending});
  }
  return flags;
}

std::string diff_to_json(const DualGraph& g, const PlanDiff& diff, int indent) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& d : diff.districts) {
    nlohmann::ordered_json j;
    j["district"] = d.district;
    j["additions"] = change_json(d.additions, g);
    j["subtractions"] = change_json(d.subtractions, g);
    out.push_back(std::move(j));
  }
  return out.dump(indent);
}

std::string borders_to_json(const Plan& plan, const std::vector<BorderFlag>& flags, int indent) {
  const DualGraph& g = plan.graph();
  auto out = nlohmann::ordered_json::array();
  for (const auto& f : flags) {
    nlohmann::ordered_json j;
    j["district"] = f.district;
    j["incumbent"] = incumbent_json(f.incumbent);
    auto edges = nlohmann::ordered_json::array();
    for (const Edge& e : f.offending_edges)
      edges.push_back({{"a", g.unit(e.u).id}, {"b", g.unit(e.v).id}, {"town", g.town_name(g.town_of(e.u))}});
    j["offending_edges"] = std::move(edges);
    out.push_back(std::move(j));
  }
  return out.dump(indent);
}

}  // namespace recom
