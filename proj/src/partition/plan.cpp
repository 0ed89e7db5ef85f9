#include <algorithm>
#include <set>

#include "recom/error.hpp"
#include "recom/partition.hpp"

namespace recom {

Aggregates aggregate_units(const DualGraph& graph, std::span<const int> units) {
  Aggregates a;
  for (int u : units) {
    const Unit& unit = graph.unit(u);
    a.pop += unit.pop;
    a.vap_total += unit.vap_total;
    a.vap_white += unit.vap_white;
    a.vap_hispanic += unit.vap_hispanic;
    a.vap_black += unit.vap_black;
    a.vap_asian += unit.vap_asian;
    a.dem_votes += unit.dem_votes;
    a.rep_votes += unit.rep_votes;
    a.incumbents.insert(a.incumbents.end(), unit.incumbents.begin(), unit.incumbents.end());
  }
  a.incumbent_count = static_cast<int>(a.incumbents.size());
  return a;
}

namespace {

bool district_connected(const DualGraph& graph, const Assignment& labels, std::span<const int> members,
                        int district) {
  if (members.empty()) return false;
  std::vector<int> stack{members.front()};
  std::vector<char> seen(graph.num_units(), 0);
  seen[static_cast<std::size_t>(members.front())] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (const auto& nb : graph.neighbors(u)) {
      const auto v = static_cast<std::size_t>(nb.unit);
      if (!seen[v] && labels[v] == district) {
        seen[v] = 1;
        ++reached;
        stack.push_back(nb.unit);
      }
    }
  }
  return reached == members.size();
}

void add_town_unit(std::vector<TownShare>& shares, int district) {
  auto it = std::lower_bound(shares.begin(), shares.end(), district,
                             [](const TownShare& s, int d) { return s.district < d; });
  if (it != shares.end() && it->district == district)
    ++it->units;
  else
    shares.insert(it, TownShare{district, 1});
}

void remove_town_unit(std::vector<TownShare>& shares, int district) {
  auto it = std::lower_bound(shares.begin(), shares.end(), district,
                             [](const TownShare& s, int d) { return s.district < d; });
  if (--it->units == 0) shares.erase(it);
}

}  // namespace

std::vector<int> Plan::cut_edges() const {
  std::vector<int> out;
  out.reserve(num_cut_);
  for (std::size_t k = 0; k < cut_.size(); ++k)
    if (cut_[k]) out.push_back(static_cast<int>(k));
  return out;
}

bool operator==(const Plan& a, const Plan& b) {
  return a.graph_ == b.graph_ && a.assignment_ == b.assignment_ && a.members_ == b.members_ &&
         a.aggs_ == b.aggs_ && a.cut_ == b.cut_ && a.num_cut_ == b.num_cut_ && a.towns_ == b.towns_ &&
         a.split_towns_ == b.split_towns_;
}

Plan build_plan(GraphPtr graph, Assignment assignment) {
  const DualGraph& g = *graph;
  if (assignment.size() != g.num_units())
    throw Error(ErrorKind::SchemaViolation, "assignment",
                "has " + std::to_string(assignment.size()) + " labels for " +
                    std::to_string(g.num_units()) + " units");
  int n = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] <= 0)
      throw Error(ErrorKind::SchemaViolation, g.unit(static_cast<int>(i)).id, "district label must be positive");
    n = std::max(n, assignment[i]);
  }

  Plan p;
  p.members_.assign(static_cast<std::size_t>(n), {});
  for (std::size_t i = 0; i < assignment.size(); ++i)
    p.members_[static_cast<std::size_t>(assignment[i] - 1)].push_back(static_cast<int>(i));
  for (int d = 1; d <= n; ++d)
    if (p.members_[static_cast<std::size_t>(d - 1)].empty())
      throw Error(ErrorKind::EmptyDistrict, std::to_string(d), {}, {d});
  for (int d = 1; d <= n; ++d)
    if (!district_connected(g, assignment, p.members_[static_cast<std::size_t>(d - 1)], d))
      throw Error(ErrorKind::DiscontiguousDistrict, std::to_string(d), {}, {d});

  p.aggs_.reserve(static_cast<std::size_t>(n));
  for (const auto& m : p.members_) p.aggs_.push_back(aggregate_units(g, m));

  p.cut_.assign(g.num_edges(), 0);
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    if (assignment[static_cast<std::size_t>(e.u)] != assignment[static_cast<std::size_t>(e.v)]) {
      p.cut_[k] = 1;
      ++p.num_cut_;
    }
  }

  p.towns_.assign(g.num_towns(), {});
  for (std::size_t t = 0; t < g.num_towns(); ++t) {
    for (int u : g.town_members(static_cast<int>(t)))
      add_town_unit(p.towns_[t], assignment[static_cast<std::size_t>(u)]);
    if (p.towns_[t].size() >= 2) ++p.split_towns_;
  }

  p.graph_ = std::move(graph);
  p.assignment_ = std::move(assignment);
  return p;
}

Plan plan_from_assignment(GraphPtr graph, Assignment assignment, int num_districts) {
  if (num_districts <= 0) throw Error(ErrorKind::InvalidConfig, "num_districts", "must be positive");
  std::vector<char> used(static_cast<std::size_t>(num_districts) + 1, 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    int label = assignment[i];
    if (label > num_districts)
      throw Error(ErrorKind::SchemaViolation, graph->unit(static_cast<int>(i)).id,
                  "district " + std::to_string(label) + " exceeds " + std::to_string(num_districts));
    if (label > 0) used[static_cast<std::size_t>(label)] = 1;
  }
  for (int d = 1; d <= num_districts; ++d)
    if (!used[static_cast<std::size_t>(d)]) throw Error(ErrorKind::LabelGap, std::to_string(d), {}, {d});
  return build_plan(std::move(graph), std::move(assignment));
}

Plan load_assignment(const std::filesystem::path& path, GraphPtr graph, int num_districts) {
  Assignment labels = read_assignment(path, *graph);
  return plan_from_assignment(std::move(graph), std::move(labels), num_districts);
}

Plan apply_recom_move(const Plan& plan, const RecomMove& move) {
  const DualGraph& g = plan.graph();
  const int a = move.district_a;
  const int b = move.district_b;
  const int n = plan.num_districts();
  if (a == b || a < 1 || b < 1 || a > n || b > n)
    throw Error(ErrorKind::InvalidMove, std::to_string(a) + "," + std::to_string(b), "bad district pair");
  if (move.new_a.empty() || move.new_b.empty())
    throw Error(ErrorKind::InvalidMove, std::to_string(a) + "," + std::to_string(b), "empty side");

  const std::size_t merged = plan.members(a).size() + plan.members(b).size();
  if (move.new_a.size() + move.new_b.size() != merged)
    throw Error(ErrorKind::InvalidMove, std::to_string(a) + "," + std::to_string(b),
                "move does not cover the merged region");

  Plan next = plan;
  std::vector<char> touched(g.num_units(), 0);
  std::vector<int> changed;
  auto assign = [&](std::span<const int> units, int label) {
    for (int u : units) {
      if (u < 0 || static_cast<std::size_t>(u) >= g.num_units())
        throw Error(ErrorKind::InvalidMove, std::to_string(u), "unit index out of range");
      const auto ui = static_cast<std::size_t>(u);
      const int current = plan.assignment_[ui];
      if (current != a && current != b)
        throw Error(ErrorKind::InvalidMove, g.unit(u).id,
                    "unit belongs to district " + std::to_string(current));
      if (touched[ui]) throw Error(ErrorKind::InvalidMove, g.unit(u).id, "unit listed twice");
      touched[ui] = 1;
      if (current != label) {
        next.assignment_[ui] = label;
        changed.push_back(u);
      }
    }
  };
  assign(move.new_a, a);
  assign(move.new_b, b);

  if (changed.empty()) return next;

  auto& ma = next.members_[static_cast<std::size_t>(a - 1)];
  auto& mb = next.members_[static_cast<std::size_t>(b - 1)];
  ma.assign(move.new_a.begin(), move.new_a.end());
  mb.assign(move.new_b.begin(), move.new_b.end());
  std::sort(ma.begin(), ma.end());
  std::sort(mb.begin(), mb.end());
  for (int d : {a, b})
    if (!district_connected(g, next.assignment_, next.members(d), d))
      throw Error(ErrorKind::DiscontiguousDistrict, std::to_string(d), {}, {d});

  next.aggs_[static_cast<std::size_t>(a - 1)] = aggregate_units(g, ma);
  next.aggs_[static_cast<std::size_t>(b - 1)] = aggregate_units(g, mb);

  for (int u : changed) {
    for (const auto& nb : g.neighbors(u)) {
      const auto k = static_cast<std::size_t>(nb.edge);
      const std::uint8_t cut =
          next.assignment_[static_cast<std::size_t>(u)] != next.assignment_[static_cast<std::size_t>(nb.unit)];
      if (cut != next.cut_[k]) {
        next.num_cut_ = cut ? next.num_cut_ + 1 : next.num_cut_ - 1;
        next.cut_[k] = cut;
      }
    }
    auto& shares = next.towns_[static_cast<std::size_t>(g.town_of(u))];
    const bool was_split = shares.size() >= 2;
    remove_town_unit(shares, plan.assignment_[static_cast<std::size_t>(u)]);
    add_town_unit(shares, next.assignment_[static_cast<std::size_t>(u)]);
    const bool is_split = shares.size() >= 2;
    next.split_towns_ += static_cast<int>(is_split) - static_cast<int>(was_split);
  }
  return next;
}

std::vector<std::pair<int, int>> district_adjacency(const Plan& plan) {
  std::set<std::pair<int, int>> pairs;
  const DualGraph& g = plan.graph();
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    if (!plan.is_cut(static_cast<int>(k))) continue;
    const Edge& e = g.edges()[k];
    int i = plan.district_of(e.u);
    int j = plan.district_of(e.v);
    pairs.emplace(std::min(i, j), std::max(i, j));
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace recom
