#include <doctest.h>

#include "recom/error.hpp"
#include "recom/partition.hpp"
#include "recom/recom_engine.hpp"
#include "test_support.hpp"

using namespace recom;
using namespace recom::testing;

TEST_CASE("path split in two has one cut edge") {
  const Plan p = build_plan(path_graph(4), {1, 1, 2, 2});
  CHECK(p.num_districts() == 2);
  CHECK(p.num_cut_edges() == 1);
  CHECK(p.cut_edges() == std::vector<int>{1});
  CHECK(p.aggregates(1).pop == 2);
  CHECK(district_adjacency(p) == std::vector<std::pair<int, int>>{{1, 2}});
}

TEST_CASE("interleaved labels are discontiguous") {
  try {
    build_plan(path_graph(4), {1, 2, 1, 2});
    FAIL("expected DiscontiguousDistrict");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DiscontiguousDistrict);
    CHECK(e.districts() == std::vector<int>{1});
  }
}

TEST_CASE("label gaps and sizes") {
  const GraphPtr g = path_graph(4);
  CHECK_THROWS_AS(build_plan(g, {1, 1, 3, 3}), Error);
  try {
    plan_from_assignment(g, {1, 1, 2, 2}, 3);
    FAIL("expected LabelGap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LabelGap);
  }
  CHECK_THROWS_AS(build_plan(g, {1, 1, 2}), Error);
}

TEST_CASE("CT House fixture extremes") {
  const GraphPtr g = load_graph(data_dir() / "house_graph.json");
  const Plan p = load_assignment(data_dir() / "house_2022.csv", g, 151);
  std::int64_t lo = INT64_MAX;
  std::int64_t hi = 0;
  for (int d = 1; d <= p.num_districts(); ++d) {
    lo = std::min(lo, p.aggregates(d).pop);
    hi = std::max(hi, p.aggregates(d).pop);
  }
  CHECK(hi == 24850);
  CHECK(lo == 22842);
  CHECK(p.aggregates(122).pop == 24850);
  CHECK(p.aggregates(1).pop == 22842);
}

TEST_CASE("invalid moves are rejected") {
  const Plan p = build_plan(grid_graph(2, 3), {1, 1, 1, 2, 2, 2});
  auto kind = [&](const RecomMove& m) {
    try {
      apply_recom_move(p, m);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind({1, 1, {0, 1, 2}, {3, 4, 5}, {}}) == ErrorKind::InvalidMove);
  CHECK(kind({1, 2, {}, {0, 1, 2, 3, 4, 5}, {}}) == ErrorKind::InvalidMove);
  CHECK(kind({1, 2, {0, 1}, {3, 4, 5}, {}}) == ErrorKind::InvalidMove);
  CHECK(kind({1, 2, {0, 1, 1}, {3, 4, 5}, {}}) == ErrorKind::InvalidMove);
  CHECK(kind({1, 2, {0, 2, 4}, {1, 3, 5}, {}}) == ErrorKind::DiscontiguousDistrict);
  const Plan q = apply_recom_move(p, {1, 2, {0, 1, 3}, {2, 4, 5}, {}});
  CHECK(q == build_plan(p.graph_ptr(), {1, 1, 2, 1, 2, 2}));
}

TEST_CASE("successor plans equal from-scratch rebuilds") {
  // Towns in 2x2 blocks so the split counter changes along the walk.
  const GraphPtr g = grid_graph(6, 6, [](int r, int c) { return "T" + std::to_string(r / 2) + std::to_string(c / 2); });
  Assignment rows(36);
  for (int u = 0; u < 36; ++u) rows[static_cast<std::size_t>(u)] = u / 6 + 1;
  Plan p = build_plan(g, rows);
  ChainConfig cfg;
  cfg.epsilon = 0.0;
  Rng rng(11);
  int moves = 0;
  for (int i = 0; i < 300; ++i) {
    auto prop = propose(p, cfg, rng);
    REQUIRE(prop.move);
    p = apply_recom_move(p, *prop.move);
    ++moves;
    const Plan fresh = build_plan(g, p.assignment());
    REQUIRE(p == fresh);
  }
  CHECK(moves == 300);
}

TEST_CASE("town shares track districts per town") {
  const GraphPtr g = grid_graph(2, 2, [](int, int c) { return c == 0 ? "L" : "R"; });
  const Plan p = build_plan(g, {1, 1, 2, 2});
  CHECK(p.split_town_count() == 2);
  const int left = 0;
  REQUIRE(p.town_shares(left).size() == 2);
  CHECK(p.town_shares(left)[0] == TownShare{1, 1});
  const Plan q = apply_recom_move(p, {1, 2, {0, 2}, {1, 3}, {}});
  CHECK(q.split_town_count() == 0);
}
