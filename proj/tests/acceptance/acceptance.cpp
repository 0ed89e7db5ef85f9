// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 = all pass).

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "recom/cli.hpp"
#include "recom/ensemble_stats.hpp"
#include "recom/metrics.hpp"
#include "recom/plan_diff.hpp"
#include "recom/recom_engine.hpp"
#include "test_support.hpp"

using namespace recom;
using namespace recom::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr double kDeviationTolPp = 0.01;
constexpr int kLeanTol = 2;
constexpr int kMajorityMinorityTol = 1;
constexpr double kTriangleTol = 0.02;
constexpr double kAuditSeconds = 1.0;
constexpr double kLongChainSeconds = 600.0;
constexpr double kOutlierCut = 99.0;
constexpr int kMinLabelAgreement = 8;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string num(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << v;
  return out.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Plan ct_plan(const std::string& chamber, const std::string& year, int n) {
  const GraphPtr g = load_graph(data_dir() / (chamber + "_graph.json"));
  return load_assignment(data_dir() / (chamber + "_" + year + ".csv"), g, n);
}

Assignment row_labels(int rows, int cols) {
  Assignment a(static_cast<std::size_t>(rows * cols));
  for (int u = 0; u < rows * cols; ++u) a[static_cast<std::size_t>(u)] = u / cols + 1;
  return a;
}

GraphPtr six_town_grid() {
  return grid_graph(6, 6, [](int r, int c) { return "T" + std::to_string(r / 2) + std::to_string(c / 3); });
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const Plan p = ct_plan("house", "2022", 151);
  const double dev = pop_deviation(p);
  const std::string table = cli::audit_table(p);
  const double secs = seconds_since(t0);
  o.require(std::abs(100.0 * dev - 8.41) <= kDeviationTolPp, "House deviation " + num(100.0 * dev) + "% vs 8.41%");
  o.require(secs < kAuditSeconds && !table.empty(), "audit " + num(secs, 3) + " s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const double dev = pop_deviation(ct_plan("senate", "2022", 36));
  o.require(std::abs(100.0 * dev - 9.99) <= kDeviationTolPp, "Senate deviation " + num(100.0 * dev) + "% vs 9.99%");
  return o;
}

Outcome criterion3() {
  Outcome o;
  auto check = [&](const std::string& chamber, int n, LeanCounts want) {
    const LeanCounts got = partisan_lean(ct_plan(chamber, "2022", n)).counts;
    const bool ok = std::abs(got.safe_dem - want.safe_dem) <= kLeanTol &&
                    std::abs(got.safe_rep - want.safe_rep) <= kLeanTol &&
                    std::abs(got.competitive - want.competitive) <= kLeanTol;
    o.require(ok, chamber + " (" + std::to_string(got.safe_dem) + "," + std::to_string(got.safe_rep) + "," +
                      std::to_string(got.competitive) + ")");
  };
  check("house", 151, {86, 11, 54});
  check("senate", 36, {23, 1, 12});
  return o;
}

Outcome criterion4() {
  Outcome o;
  const int house = majority_minority_count(ct_plan("house", "2022", 151));
  const int senate = majority_minority_count(ct_plan("senate", "2022", 36));
  o.require(std::abs(house - 36) <= kMajorityMinorityTol, "House " + std::to_string(house));
  o.require(std::abs(senate - 7) <= kMajorityMinorityTol, "Senate " + std::to_string(senate));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto senate = incumbent_distribution(ct_plan("senate", "2022", 36));
  const auto house = incumbent_distribution(ct_plan("house", "2022", 151));
  o.require(senate.single == 36 && senate.single_fraction == 1.0,
            "Senate single " + std::to_string(senate.single) + "/36");
  o.require(house.single + house.multi == 150, "House with any incumbent " +
                                                   std::to_string(house.single + house.multi) + "/151");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const Plan house = ct_plan("house", "2022", 151);
  const Plan senate = ct_plan("senate", "2022", 36);
  o.require(town_splits(house) == 72 && count_town_splits(house) == 72,
            "House " + std::to_string(town_splits(house)));
  o.require(town_splits(senate) == 38 && count_town_splits(senate) == 38,
            "Senate " + std::to_string(town_splits(senate)));
  return o;
}

Outcome criterion7() {
  Outcome o;

  // (a) + (c): 6x6 grid, six 2x3 towns, row districts, split-bounded.
  {
    const GraphPtr g = six_town_grid();
    const Plan start = build_plan(g, row_labels(6, 6));
    ChainConfig cfg;
    cfg.steps = 2000;
    cfg.epsilon = 0.2;
    cfg.seed = 71;
    const double ideal = static_cast<double>(g->total_pop()) / 6.0;
    int bad_states = 0;
    int accepted = 0;
    int raised = 0;
    int prev = start.split_town_count();
    run_chain(start, cfg, {}, [&](const Plan& p, const MetricRecord& r) {
      if (r.accepted) {
        ++accepted;
        bool ok = all_districts_connected(*g, p.assignment(), 6);
        std::vector<std::int64_t> pops(6, 0);
        for (std::size_t u = 0; u < p.assignment().size(); ++u) ++pops[static_cast<std::size_t>(p.assignment()[u] - 1)];
        for (auto pop : pops) ok = ok && std::abs(static_cast<double>(pop) - ideal) <= cfg.epsilon * ideal;
        if (!ok) ++bad_states;
        if (r.town_splits > prev) ++raised;
      }
      prev = r.town_splits;
    });
    o.require(bad_states == 0 && accepted > 0, "(a) " + std::to_string(accepted) + " accepted states, " +
                                                   std::to_string(bad_states) + " fail contiguity/balance");
    o.require(raised == 0, "(c) " + std::to_string(raised) + " accepted transitions raised town splits");
  }

  // (b): 2x3 unit grid, 3/3 split, epsilon 0, always-accept, 10,000 steps.
  {
    const GraphPtr g = grid_graph(2, 3);
    const auto support = balanced_bipartitions(*g, 3.0, 0.0);
    const Plan start = build_plan(g, {1, 1, 1, 2, 2, 2});
    ChainConfig cfg;
    cfg.steps = 10000;
    cfg.epsilon = 0.0;
    cfg.seed = 72;
    cfg.acceptance = Acceptance::AlwaysAccept;
    std::set<std::uint32_t> visited;
    run_chain(start, cfg, {}, [&](const Plan& p, const MetricRecord&) { visited.insert(side_mask(p)); });
    std::size_t covered = 0;
    for (auto m : support) covered += visited.count(m);
    o.require(covered == support.size() && visited.size() == support.size(),
              "(b) visited " + std::to_string(covered) + "/" + std::to_string(support.size()) + " bipartitions");
  }

  // (d): planted incumbents down the centre column, one per row district.
  {
    const GraphPtr g = grid_graph(8, 8, [](int r, int c) { return grid_id(r, c); }, [](Unit& u, int, int c) {
      if (c == 3) u.incumbents = {{"inc-" + u.id, Party::Dem, u.id}};
    });
    const Plan enacted = build_plan(g, row_labels(8, 8));
    const double enacted_frac = incumbent_distribution(enacted).single_fraction;
    ChainConfig cfg;
    cfg.epsilon = 0.0;
    cfg.seed = 74;
    const auto report = run_chain(enacted, cfg);
    const auto s = summarize(report.records, "single_incumbent_frac", enacted_frac);
    o.require(enacted_frac == 1.0 && outlier_verdict(s, kOutlierCut) == Verdict::Outlier,
              "(d) enacted " + num(enacted_frac, 2) + " at percentile " + num(s.enacted_percentile, 3) +
                  ", ensemble mean " + num(s.mean, 3));
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "recom_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const GraphPtr g = six_town_grid();
  std::ofstream(dir / "grid.json") << graph_to_json(*g);
  std::ofstream(dir / "rows.csv") << assignment_to_csv(*g, row_labels(6, 6));

  std::ostringstream sink;
  auto run_once = [&](const std::string& tag) {
    const fs::path out = dir / tag;
    int rc = cli::run({"chain", "--graph", (dir / "grid.json").string(), "--assignment", (dir / "rows.csv").string(),
                       "--steps", "1000", "--seed", "8", "--epsilon", "0.2", "--tree", "region-aware", "--out-dir",
                       out.string()},
                      sink, sink);
    rc |= cli::run({"report", "--input", (out / "chain_0.ndjson").string(), "--graph", (dir / "grid.json").string(),
                    "--assignment", (dir / "rows.csv").string(), "--out-dir", (out / "report").string()},
                   sink, sink);
    return rc;
  };
  const int rc = run_once("a") | run_once("b");
  auto same = [&](const fs::path& rel) { return read_file(dir / "a" / rel) == read_file(dir / "b" / rel); };
  o.require(rc == 0, "exit codes");
  o.require(rc == 0 && same("chain_0.ndjson"), "NDJSON byte-identical");
  o.require(rc == 0 && same("report/summary.json") && same("report/histogram_town_splits.csv"),
            "summaries byte-identical");
  return o;
}

Outcome criterion9() {
  Outcome o;
  {
    const std::vector<Edge> tri{{0, 1}, {0, 2}, {1, 2}};
    const SubGraph view = SubGraph::from_edges(3, tri);
    Rng rng(91);
    std::map<std::vector<Edge>, int> freq;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++freq[random_spanning_tree(view, TreePolicy::uniform(), rng)];
    bool ok = freq.size() == 3;
    std::string shares;
    double chi2 = 0.0;
    for (const auto& [tree, n] : freq) {
      const double share = static_cast<double>(n) / draws;
      ok = ok && std::abs(share - 1.0 / 3.0) <= kTriangleTol;
      chi2 += (n - draws / 3.0) * (n - draws / 3.0) / (draws / 3.0);
      shares += (shares.empty() ? "" : ",") + num(share, 4);
    }
    // 2 degrees of freedom; 0.999 quantile 13.82.
    o.require(ok && chi2 < 13.82, "triangle shares " + shares + " chi2 " + num(chi2, 2));
  }
  {
    std::vector<Edge> edges;
    for (int c = 0; c < 4; ++c) {
      if (c + 1 < 4) {
        edges.push_back({c, c + 1});
        edges.push_back({4 + c, 4 + c + 1});
      }
      edges.push_back({c, 4 + c});
    }
    const std::vector<int> towns{0, 0, 1, 1, 0, 0, 1, 1};
    const SubGraph view = SubGraph::from_edges(8, edges, towns);
    auto mean_cross = [&](const TreePolicy& policy) {
      Rng rng(92);
      long total = 0;
      for (int i = 0; i < 10000; ++i)
        for (const Edge& e : random_spanning_tree(view, policy, rng))
          total += towns[static_cast<std::size_t>(e.u)] != towns[static_cast<std::size_t>(e.v)];
      return total / 10000.0;
    };
    const double uniform = mean_cross(TreePolicy::uniform());
    const double aware = mean_cross(TreePolicy::region_aware(2.0));
    o.require(aware < uniform, "cross-town edges uniform " + num(uniform, 3) + " vs region-aware " + num(aware, 3));
  }
  return o;
}

// Expected per-district label from the per-item effects in house_changes.csv:
// any benefit without disadvantage -> benefit, the converse -> disadvantage,
// both or neither -> neutral.
std::map<int, std::string> expected_labels() {
  std::map<int, std::set<std::string>> effects;
  std::istringstream in(read_file(data_dir() / "house_changes.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    effects[std::stoi(cells[0])].insert(cells[3]);
  }
  std::map<int, std::string> out;
  for (const auto& [d, e] : effects) {
    const bool benefit = e.count("benefit") > 0;
    const bool disadvantage = e.count("disadvantage") > 0;
    out[d] = benefit == disadvantage ? "neutral" : benefit ? "benefit" : "disadvantage";
  }
  return out;
}

Outcome criterion10() {
  Outcome o;
  std::ostringstream out;
  std::ostringstream err;
  const int rc = cli::run({"compare", "--graph", (data_dir() / "house_graph.json").string(), "--old",
                           (data_dir() / "house_2012.csv").string(), "--new", (data_dir() / "house_2022.csv").string(),
                           "--margins", (data_dir() / "house_margins.csv").string(), "--margin-cut", "0.025"},
                          out, err);
  if (rc != 0) {
    o.require(false, "compare exit " + std::to_string(rc) + ": " + err.str());
    return o;
  }
  const auto doc = nlohmann::json::parse(out.str());
  const std::set<int> competitive_ids{90, 103, 119, 37, 123, 35, 43, 132, 38, 55};
  std::set<int> reported;
  auto expected = expected_labels();
  expected[35] = "neutral";
  int agree = 0;
  std::string misses;
  bool d35_empty = false;
  std::string d55;
  for (const auto& d : doc["districts"]) {
    const int id = d["district"];
    reported.insert(id);
    const std::string label = d["classification"];
    if (expected.count(id) && expected[id] == label)
      ++agree;
    else
      misses += " D" + std::to_string(id) + "=" + label;
    if (id == 35) d35_empty = d["unchanged"];
    if (id == 55) d55 = label;
  }
  o.require(reported == competitive_ids, std::to_string(reported.size()) + " districts reported");
  o.require(d35_empty, "D35 unchanged");
  o.require(d55 == "disadvantage", "D55 " + d55);
  o.require(agree >= kMinLabelAgreement, "label agreement " + std::to_string(agree) + "/10" +
                                             (misses.empty() ? "" : " (off:" + misses + ")"));
  return o;
}

Outcome criterion11() {
  Outcome o;
  constexpr int kRows = 25;
  constexpr int kCols = 40;
  constexpr int kDistricts = 36;
  const GraphPtr g = grid_graph(kRows, kCols, [](int r, int c) { return "T" + std::to_string(r / 5) + "-" + std::to_string(c / 5); });
  // Boustrophedon order cut into 36 consecutive chunks of 27 or 28 cells.
  Assignment labels(static_cast<std::size_t>(kRows * kCols));
  int k = 0;
  for (int r = 0; r < kRows; ++r)
    for (int i = 0; i < kCols; ++i) {
      const int c = r % 2 == 0 ? i : kCols - 1 - i;
      labels[static_cast<std::size_t>(r * kCols + c)] = k * kDistricts / (kRows * kCols) + 1;
      ++k;
    }
  const Plan start = build_plan(g, labels);
  ChainConfig cfg;
  cfg.seed = 11;
  cfg.epsilon = 0.05;
  int sampled = 0;
  int mismatched = 0;
  const auto t0 = Clock::now();
  const auto report = run_chain(start, cfg, {}, [&](const Plan& p, const MetricRecord& r) {
    if (r.step % 20 != 0) return;
    ++sampled;
    const Plan fresh = build_plan(p.graph_ptr(), p.assignment());
    if (!(fresh == p) || compute_record(fresh, r.step, r.accepted) != r) ++mismatched;
  });
  const double secs = seconds_since(t0);
  o.require(report.records.size() == 20000 && secs < kLongChainSeconds,
            "20,000 steps on " + std::to_string(g->num_units()) + " units / " + std::to_string(kDistricts) +
                " districts in " + num(secs, 1) + " s (incl. checks), accepted " +
                std::to_string(report.accepted_steps));
  o.require(sampled == 1000 && mismatched == 0,
            std::to_string(sampled) + " sampled steps, " + std::to_string(mismatched) + " differ from rebuild");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"House audit deviation 8.41% and runtime", criterion1},
      {"Senate audit deviation 9.99%", criterion2},
      {"lean counts House (86,11,54) Senate (23,1,12)", criterion3},
      {"majority-minority House 36 Senate 7", criterion4},
      {"incumbent distribution Senate 36/36, House 150/151", criterion5},
      {"town splits House 72 Senate 38", criterion6},
      {"ensemble properties (a)-(d)", criterion7},
      {"seeded determinism", criterion8},
      {"spanning tree sanity", criterion9},
      {"competitive-diff fidelity", criterion10},
      {"performance and incremental exactness", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " | "
              << o.detail << std::endl;
  }
  return failed;
}
