#include <doctest.h>

#include <bit>
#include <map>
#include <numeric>

#include "recom/error.hpp"
#include "recom/recom_engine.hpp"
#include "test_support.hpp"

using namespace recom;
using namespace recom::testing;

namespace {

std::vector<Edge> sorted(std::vector<Edge> e) {
  std::sort(e.begin(), e.end());
  return e;
}

bool is_spanning_tree(int n, const std::vector<Edge>& tree) {
  if (static_cast<int>(tree.size()) != n - 1) return false;
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = find(parent[static_cast<std::size_t>(x)]);
  };
  for (const Edge& e : tree) {
    const int a = find(e.u);
    const int b = find(e.v);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
  }
  return true;
}

// Every spanning tree of a small graph, by subset enumeration.
std::vector<std::vector<Edge>> all_spanning_trees(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<Edge>> out;
  const auto m = edges.size();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != n - 1) continue;
    std::vector<Edge> pick;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1u) pick.push_back(edges[i]);
    if (is_spanning_tree(n, pick)) out.push_back(pick);
  }
  return out;
}

std::vector<Edge> grid_edges(int rows, int cols) {
  std::vector<Edge> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.push_back({r * cols + c, r * cols + c + 1});
      if (r + 1 < rows) e.push_back({r * cols + c, (r + 1) * cols + c});
    }
  return e;
}

}  // namespace

TEST_CASE("rng streams are reproducible and bounded") {
  Rng a(42);
  Rng b(42);
  Rng c(42, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.below(7) < 7);
    const double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("a tree input is returned unchanged under either policy") {
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  const SubGraph view = SubGraph::from_edges(4, path);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    CHECK(random_spanning_tree(view, TreePolicy::uniform(), rng) == path);
    CHECK(random_spanning_tree(view, TreePolicy::region_aware(), rng) == path);
  }
}

TEST_CASE("bridges appear in every tree") {
  // Two triangles-with-a-pendant joined by the bridge 1-2.
  const std::vector<Edge> edges{{0, 1}, {2, 3}, {1, 2}, {0, 4}, {1, 4}, {2, 5}, {3, 5}};
  const SubGraph view = SubGraph::from_edges(6, edges, {0, 0, 1, 1, 0, 1});
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    for (auto policy : {TreePolicy::uniform(), TreePolicy::region_aware()}) {
      const auto t = random_spanning_tree(view, policy, rng);
      CHECK(is_spanning_tree(6, t));
      CHECK(std::find(t.begin(), t.end(), Edge{1, 2}) != t.end());
    }
  }
}

TEST_CASE("disconnected views are rejected") {
  const std::vector<Edge> edges{{0, 1}, {2, 3}};
  Rng rng(1);
  CHECK_THROWS_AS(random_spanning_tree(SubGraph::from_edges(4, edges), TreePolicy::uniform(), rng), Error);
  CHECK_THROWS_AS(random_spanning_tree(SubGraph::from_edges(1, {}), TreePolicy::uniform(), rng), Error);
}

TEST_CASE("uniform trees on the 2x3 grid hit all 15 trees about equally") {
  const auto edges = grid_edges(2, 3);
  const auto trees = all_spanning_trees(6, edges);
  REQUIRE(trees.size() == 15);
  const SubGraph view = SubGraph::from_edges(6, edges);
  std::map<std::vector<Edge>, int> freq;
  Rng rng(99);
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) ++freq[random_spanning_tree(view, TreePolicy::uniform(), rng)];
  CHECK(freq.size() == 15);
  double chi2 = 0.0;
  const double expect = draws / 15.0;
  for (const auto& [t, n] : freq) chi2 += (n - expect) * (n - expect) / expect;
  // 14 degrees of freedom; the 0.999 quantile is 36.1.
  CHECK(chi2 < 36.1);
}

TEST_CASE("balanced cut examples") {
  const std::vector<std::int64_t> ones4(4, 1);
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  CHECK(balanced_cut_candidates(path, ones4, 2.0, 0.0) == std::vector<Edge>{{1, 2}});

  const std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}};
  const std::vector<std::int64_t> ones6(6, 1);
  CHECK(balanced_cut_candidates(star, ones6, 3.0, 0.0).empty());
}

TEST_CASE("balanced cuts match direct enumeration on every 2x3 tree") {
  const auto edges = grid_edges(2, 3);
  const std::vector<std::int64_t> pops(6, 1);
  for (const auto& tree : all_spanning_trees(6, edges)) {
    std::vector<Edge> expected;
    for (const Edge& cut : tree) {
      const auto side = tree_side(6, tree, cut);
      const auto part = std::count(side.begin(), side.end(), 1);
      if (part == 3) expected.push_back(cut);
    }
    CHECK(sorted(balanced_cut_candidates(tree, pops, 3.0, 0.0)) == sorted(expected));
  }
}

TEST_CASE("proposals on a path re-create the 2/2 split") {
  const Plan p = build_plan(path_graph(4), {1, 1, 2, 2});
  ChainConfig cfg;
  cfg.epsilon = 0.0;
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto prop = propose(p, cfg, rng);
    REQUIRE(prop.move);
    CHECK(prop.move->new_a == std::vector<int>{0, 1});
    CHECK(prop.move->new_b == std::vector<int>{2, 3});
    CHECK(prop.move->cut_edge == Edge{1, 2});
  }
}

TEST_CASE("a one-district plan has no proposal") {
  const Plan p = build_plan(path_graph(3), {1, 1, 1});
  Rng rng(1);
  CHECK_FALSE(propose(p, ChainConfig{}, rng).move);
}

TEST_CASE("4x4 proposals stay inside the brute-force support") {
  const GraphPtr g = grid_graph(4, 4);
  const auto support = balanced_bipartitions(*g, 8.0, 0.0);
  Assignment halves(16);
  for (int u = 0; u < 16; ++u) halves[static_cast<std::size_t>(u)] = u < 8 ? 1 : 2;
  Plan p = build_plan(g, halves);
  ChainConfig cfg;
  cfg.epsilon = 0.0;
  Rng rng(2024);
  std::set<std::uint32_t> seen;
  for (int i = 0; i < 100000; ++i) {
    auto prop = propose(p, cfg, rng);
    REQUIRE(prop.move);
    const Plan q = apply_recom_move(p, *prop.move);
    if (i < 5000) REQUIRE(all_districts_connected(*g, q.assignment(), 2));
    seen.insert(side_mask(q));
    p = q;
  }
  for (auto m : seen) CHECK(support.count(m) == 1);
  // The rarest split has probability near 1.5e-4 per proposal, so full
  // coverage needs far more than 5,000 draws.
  CHECK(seen.size() == support.size());
  CHECK(support.size() == 70);
}

TEST_CASE("region-aware trees cross towns less often") {
  const auto edges = grid_edges(2, 4);
  const std::vector<int> towns{0, 0, 1, 1, 0, 0, 1, 1};
  const SubGraph view = SubGraph::from_edges(8, edges, towns);
  auto mean_cross = [&](TreePolicy policy, std::uint64_t seed) {
    Rng rng(seed);
    long total = 0;
    for (int i = 0; i < 10000; ++i)
      for (const Edge& e : random_spanning_tree(view, policy, rng))
        total += towns[static_cast<std::size_t>(e.u)] != towns[static_cast<std::size_t>(e.v)];
    return static_cast<double>(total) / 10000.0;
  };
  const double uniform = mean_cross(TreePolicy::uniform(), 17);
  const double aware = mean_cross(TreePolicy::region_aware(2.0), 17);
  MESSAGE("mean cross-town edges: uniform " << uniform << ", region-aware " << aware);
  CHECK(aware < uniform);
  CHECK(aware == doctest::Approx(1.0));  // surcharge 2 exceeds any within-town weight
}

TEST_CASE("config validation") {
  ChainConfig c;
  CHECK_NOTHROW(c.validate());
  c.epsilon = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.steps = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.max_tree_retries = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.tree_policy = TreePolicy::region_aware(0.0);
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(acceptance_from_string("split-strict") == Acceptance::SplitStrict);
  CHECK_FALSE(acceptance_from_string("strict"));
}

TEST_CASE("run_chain basics") {
  const Plan p = build_plan(path_graph(4), {1, 1, 2, 2});
  ChainConfig cfg;
  cfg.epsilon = 0.0;

  SUBCASE("zero steps") {
    cfg.steps = 0;
    const auto r = run_chain(p, cfg);
    CHECK(r.records.empty());
    CHECK(r.accepted_steps == 0);
    CHECK(r.rejected_proposals == 0);
  }
  SUBCASE("path of 4 stays balanced") {
    cfg.steps = 100;
    int emitted = 0;
    const auto r = run_chain(p, cfg, [&](const MetricRecord&) { ++emitted; });
    CHECK(emitted == 100);
    REQUIRE(r.records.size() == 100);
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      CHECK(r.records[i].step == static_cast<std::int64_t>(i + 1));
      CHECK(r.records[i].pop_deviation == 0.0);
      CHECK(r.records[i].town_splits == 1);  // one town spans both districts
    }
    CHECK(r.accepted_steps + r.rejected_proposals + r.no_proposal_steps == 100);
  }
  SUBCASE("unbalanced start lists districts") {
    const Plan q = build_plan(path_graph(4), {1, 2, 2, 2});
    try {
      run_chain(q, cfg);
      FAIL("expected UnbalancedInitialPlan");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnbalancedInitialPlan);
      CHECK(e.districts() == std::vector<int>{1, 2});
    }
  }
  SUBCASE("one district records no-proposal steps") {
    cfg.steps = 3;
    const auto r = run_chain(build_plan(path_graph(3), {1, 1, 1}), cfg);
    CHECK(r.no_proposal_steps == 3);
    CHECK(r.records.size() == 3);
  }
}

TEST_CASE("split-bounded chains never raise town splits on acceptance") {
  const GraphPtr g = grid_graph(6, 6, [](int r, int c) { return "T" + std::to_string(r / 2) + std::to_string(c / 3); });
  Assignment rows(36);
  for (int u = 0; u < 36; ++u) rows[static_cast<std::size_t>(u)] = u / 6 + 1;
  const Plan start = build_plan(g, rows);
  for (auto acceptance : {Acceptance::SplitBounded, Acceptance::SplitStrict}) {
    ChainConfig cfg;
    cfg.steps = 2000;
    cfg.epsilon = 0.0;
    cfg.seed = 8;
    cfg.acceptance = acceptance;
    const auto r = run_chain(start, cfg);
    int prev = start.split_town_count();
    for (const auto& rec : r.records) {
      if (rec.accepted) {
        if (acceptance == Acceptance::SplitBounded)
          CHECK(rec.town_splits <= prev);
        else
          CHECK(rec.town_splits < prev);
      } else {
        CHECK(rec.town_splits == prev);
      }
      prev = rec.town_splits;
    }
  }
}

TEST_CASE("identical seeds give identical reports, distinct streams differ") {
  const GraphPtr g = grid_graph(6, 6);
  Assignment rows(36);
  for (int u = 0; u < 36; ++u) rows[static_cast<std::size_t>(u)] = u / 6 + 1;
  const Plan start = build_plan(g, rows);
  ChainConfig cfg;
  cfg.steps = 300;
  cfg.epsilon = 0.0;
  cfg.seed = 77;
  const std::string a = chain_report_to_text(run_chain(start, cfg));
  const std::string b = chain_report_to_text(run_chain(start, cfg));
  CHECK(a == b);
  std::vector<Assignment> s0;
  std::vector<Assignment> s1;
  run_chain(start, cfg, {}, [&](const Plan& p, const MetricRecord&) { s0.push_back(p.assignment()); }, 0);
  run_chain(start, cfg, {}, [&](const Plan& p, const MetricRecord&) { s1.push_back(p.assignment()); }, 1);
  CHECK(s0 != s1);
}
