#include <algorithm>
#include <cmath>
#include <numeric>

#include "recom/error.hpp"
#include "recom/recom_engine.hpp"

namespace recom {

namespace {

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

void require_connected(const SubGraph& view) {
  const int n = view.size();
  if (n < 2) throw Error(ErrorKind::NotConnected, "subgraph", "fewer than 2 vertices");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& arc : view.adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(arc.to)]) continue;
      seen[static_cast<std::size_t>(arc.to)] = 1;
      ++reached;
      stack.push_back(arc.to);
    }
  }
  if (reached != n) throw Error(ErrorKind::NotConnected, "subgraph", std::to_string(n - reached) + " unreachable vertices");
}

std::vector<Edge> wilson_tree(const SubGraph& view, Rng& rng) {
  const auto n = static_cast<std::size_t>(view.size());
  std::vector<char> in_tree(n, 0);
  std::vector<int> next(n, -1);
  in_tree[rng.below(n)] = 1;

  std::vector<Edge> tree;
  tree.reserve(n - 1);
  for (std::size_t start = 0; start < n; ++start) {
    // Loop erasure is implicit: revisiting a vertex overwrites its successor.
    int u = static_cast<int>(start);
    while (!in_tree[static_cast<std::size_t>(u)]) {
      const auto& arcs = view.adj[static_cast<std::size_t>(u)];
      next[static_cast<std::size_t>(u)] = arcs[rng.below(arcs.size())].to;
      u = next[static_cast<std::size_t>(u)];
    }
    u = static_cast<int>(start);
    while (!in_tree[static_cast<std::size_t>(u)]) {
      in_tree[static_cast<std::size_t>(u)] = 1;
      const int v = next[static_cast<std::size_t>(u)];
      tree.push_back(make_edge(u, v));
      u = v;
    }
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

std::vector<Edge> region_aware_tree(const SubGraph& view, double surcharge, Rng& rng) {
  const std::size_t m = view.edges.size();
  std::vector<double> weight(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Edge& e = view.edges[i];
    const bool crosses = view.town[static_cast<std::size_t>(e.u)] != view.town[static_cast<std::size_t>(e.v)];
    weight[i] = rng.uniform01() + (crosses ? surcharge : 0.0);
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return weight[a] != weight[b] ? weight[a] < weight[b] : a < b;
  });

  DisjointSets sets(static_cast<std::size_t>(view.size()));
  std::vector<Edge> tree;
  tree.reserve(static_cast<std::size_t>(view.size() - 1));
  for (std::size_t i : order) {
    const Edge& e = view.edges[i];
    if (sets.unite(e.u, e.v)) tree.push_back(e);
    if (tree.size() + 1 == static_cast<std::size_t>(view.size())) break;
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

}  // namespace

SubGraph SubGraph::from_edges(int n, std::span<const Edge> edges, std::vector<int> towns,
                              std::vector<std::int64_t> pops) {
  SubGraph g;
  const auto size = static_cast<std::size_t>(n);
  g.units.resize(size);
  std::iota(g.units.begin(), g.units.end(), 0);
  g.adj.resize(size);
  g.town = towns.empty() ? std::vector<int>(size, 0) : std::move(towns);
  g.pop = pops.empty() ? std::vector<std::int64_t>(size, 1) : std::move(pops);
  if (g.town.size() != size || g.pop.size() != size)
    throw Error(ErrorKind::SchemaViolation, "subgraph", "town/pop length differs from vertex count");
  for (const Edge& raw : edges) {
    if (raw.u < 0 || raw.v < 0 || raw.u >= n || raw.v >= n || raw.u == raw.v)
      throw Error(ErrorKind::SchemaViolation, "subgraph", "edge endpoint out of range");
    const Edge e = make_edge(raw.u, raw.v);
    const int id = static_cast<int>(g.edges.size());
    g.edges.push_back(e);
    g.adj[static_cast<std::size_t>(e.u)].push_back({e.v, id});
    g.adj[static_cast<std::size_t>(e.v)].push_back({e.u, id});
  }
  return g;
}

SubGraph SubGraph::induced(const DualGraph& graph, std::span<const int> units) {
  SubGraph g;
  const std::size_t n = units.size();
  g.units.assign(units.begin(), units.end());
  g.adj.resize(n);
  g.town.resize(n);
  g.pop.resize(n);
  auto local = [&](int unit) {
    auto it = std::lower_bound(g.units.begin(), g.units.end(), unit);
    return (it != g.units.end() && *it == unit) ? static_cast<int>(it - g.units.begin()) : -1;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const int u = g.units[i];
    g.town[i] = graph.town_of(u);
    g.pop[i] = graph.unit(u).pop;
    for (const auto& nb : graph.neighbors(u)) {
      if (nb.unit <= u) continue;
      const int j = local(nb.unit);
      if (j < 0) continue;
      const int id = static_cast<int>(g.edges.size());
      g.edges.push_back({static_cast<int>(i), j});
      g.adj[i].push_back({j, id});
      g.adj[static_cast<std::size_t>(j)].push_back({static_cast<int>(i), id});
    }
  }
  return g;
}

std::vector<Edge> random_spanning_tree(const SubGraph& view, const TreePolicy& policy, Rng& rng) {
  require_connected(view);
  if (policy.kind == TreePolicy::Kind::RegionAware) return region_aware_tree(view, policy.surcharge, rng);
  return wilson_tree(view, rng);
}

std::vector<Edge> balanced_cut_candidates(std::span<const Edge> tree, std::span<const std::int64_t> pops,
                                          double ideal, double epsilon) {
  const std::size_t n = pops.size();
  if (n < 2 || tree.size() + 1 != n) return {};
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : tree) {
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  std::vector<int> parent(n, -1);
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> stack{0};
  parent[0] = 0;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    order.push_back(u);
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (parent[static_cast<std::size_t>(v)] != -1) continue;
      parent[static_cast<std::size_t>(v)] = u;
      stack.push_back(v);
    }
  }
  if (order.size() != n) return {};

  std::vector<std::int64_t> subtree(pops.begin(), pops.end());
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (*it != 0) subtree[static_cast<std::size_t>(parent[static_cast<std::size_t>(*it)])] += subtree[static_cast<std::size_t>(*it)];
  const std::int64_t total = subtree[0];
  const double tol = epsilon * ideal;
  auto within = [&](std::int64_t p) { return std::abs(static_cast<double>(p) - ideal) <= tol; };

  std::vector<Edge> out;
  for (const Edge& e : tree) {
    const int child = parent[static_cast<std::size_t>(e.v)] == e.u ? e.v : e.u;
    const std::int64_t part = subtree[static_cast<std::size_t>(child)];
    if (within(part) && within(total - part)) out.push_back(e);
  }
  return out;
}

std::vector<char> tree_side(int n, std::span<const Edge> tree, const Edge& cut) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const Edge& e : tree) {
    if (e == cut) continue;
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  std::vector<char> side(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  side[0] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (side[static_cast<std::size_t>(v)]) continue;
      side[static_cast<std::size_t>(v)] = 1;
      stack.push_back(v);
    }
  }
  return side;
}

}  // namespace recom
