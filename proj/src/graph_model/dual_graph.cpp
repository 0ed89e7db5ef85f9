#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "recom/error.hpp"
#include "recom/graph_model.hpp"

namespace recom {

std::string_view party_code(Party p) {
  switch (p) {
    case Party::Dem: return "D";
    case Party::Rep: return "R";
    case Party::Other: return "O";
  }
  return "O";
}

std::optional<Party> party_from_code(std::string_view code) {
  if (code == "D") return Party::Dem;
  if (code == "R") return Party::Rep;
  if (code == "O") return Party::Other;
  return std::nullopt;
}

namespace {

void check_unit_counts(const Unit& u) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::SchemaViolation, u.id, what);
  };
  if (u.id.empty()) fail("empty unit id");
  if (u.pop < 0 || u.vap_total < 0 || u.vap_white < 0 || u.vap_hispanic < 0 ||
      u.vap_black < 0 || u.vap_asian < 0)
    fail("negative count");
  if (!(u.dem_votes >= 0.0) || !(u.rep_votes >= 0.0)) fail("negative or non-finite vote tally");
  if (u.vap_total > u.pop) fail("vap_total exceeds pop");
  for (auto group : {u.vap_white, u.vap_hispanic, u.vap_black, u.vap_asian})
    if (group > u.vap_total) fail("VAP group exceeds vap_total");
}

}  // namespace

DualGraph DualGraph::build(std::vector<Unit> units, std::span<const EdgeSpec> edges) {
  if (units.empty()) throw Error(ErrorKind::SchemaViolation, "units", "graph has no units");

  DualGraph g;
  g.index_.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    check_unit_counts(units[i]);
    if (!g.index_.emplace(units[i].id, static_cast<int>(i)).second)
      throw Error(ErrorKind::DuplicateUnitId, units[i].id);
  }
  for (const auto& u : units) {
    for (const auto& inc : u.incumbents) {
      if (inc.home_unit != u.id)
        throw Error(ErrorKind::SchemaViolation, u.id,
                    "incumbent '" + inc.name + "' has home_unit '" + inc.home_unit +
                        "' but is listed under this unit");
    }
  }
  g.units_ = std::move(units);

  std::set<Edge> seen;
  g.edges_.reserve(edges.size());
  for (const auto& spec : edges) {
    auto a = g.index_of(spec.a);
    if (!a) throw Error(ErrorKind::DanglingEdge, spec.a, "edge (" + spec.a + "," + spec.b + ")");
    auto b = g.index_of(spec.b);
    if (!b) throw Error(ErrorKind::DanglingEdge, spec.b, "edge (" + spec.a + "," + spec.b + ")");
    if (*a == *b) throw Error(ErrorKind::SchemaViolation, spec.a, "self-loop edge");
    Edge e{std::min(*a, *b), std::max(*a, *b)};
    if (!seen.insert(e).second)
      throw Error(ErrorKind::SchemaViolation, spec.a + "," + spec.b, "duplicate edge");
    g.edges_.push_back(e);
  }
  std::sort(g.edges_.begin(), g.edges_.end());

  const std::size_t n = g.units_.size();
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : g.edges_) {
    ++degree[static_cast<std::size_t>(e.u)];
    ++degree[static_cast<std::size_t>(e.v)];
  }
  g.adj_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.adj_offsets_[i + 1] = g.adj_offsets_[i] + degree[i];
  g.adj_.resize(g.adj_offsets_[n]);
  std::vector<std::size_t> fill(g.adj_offsets_.begin(), g.adj_offsets_.end() - 1);
  for (std::size_t k = 0; k < g.edges_.size(); ++k) {
    const auto& e = g.edges_[k];
    g.adj_[fill[static_cast<std::size_t>(e.u)]++] = {e.v, static_cast<int>(k)};
    g.adj_[fill[static_cast<std::size_t>(e.v)]++] = {e.u, static_cast<int>(k)};
  }

  std::vector<char> seen_unit(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen_unit[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (const auto& nb : g.neighbors(u)) {
      if (!seen_unit[static_cast<std::size_t>(nb.unit)]) {
        seen_unit[static_cast<std::size_t>(nb.unit)] = 1;
        ++reached;
        frontier.push(nb.unit);
      }
    }
  }
  if (reached != n) {
    auto it = std::find(seen_unit.begin(), seen_unit.end(), 0);
    const auto& stray = g.units_[static_cast<std::size_t>(it - seen_unit.begin())].id;
    throw Error(ErrorKind::DisconnectedGraph, stray,
                std::to_string(n - reached) + " of " + std::to_string(n) +
                    " units unreachable from '" + g.units_[0].id + "'");
  }

  std::map<std::string, std::vector<int>> towns;
  for (std::size_t i = 0; i < n; ++i) towns[g.units_[i].town].push_back(static_cast<int>(i));
  g.unit_town_.assign(n, 0);
  for (auto& [name, members] : towns) {
    const int t = static_cast<int>(g.town_names_.size());
    for (int u : members) g.unit_town_[static_cast<std::size_t>(u)] = t;
    g.town_names_.push_back(name);
    g.town_members_.push_back(std::move(members));
  }

  for (const auto& u : g.units_) {
    g.total_pop_ += u.pop;
    g.total_votes_ += u.dem_votes + u.rep_votes;
    g.total_incumbents_ += u.incumbents.size();
  }
  return g;
}

std::span<const DualGraph::Neighbor> DualGraph::neighbors(int u) const {
  const auto i = static_cast<std::size_t>(u);
  return {adj_.data() + adj_offsets_[i], adj_offsets_[i + 1] - adj_offsets_[i]};
}

std::optional<int> DualGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace recom
