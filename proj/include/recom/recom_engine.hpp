#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "recom/metrics.hpp"
#include "recom/partition.hpp"
#include "recom/rng.hpp"

namespace recom {

/// Small local graph over a merged region (or any test graph). Vertices are
/// 0..size()-1; `units` maps them back to DualGraph unit indices when the
/// view was induced from a graph.
struct SubGraph {
  struct Arc {
    int to;
    int edge;
  };

  std::vector<int> units;
  std::vector<Edge> edges;
  std::vector<std::vector<Arc>> adj;
  std::vector<int> town;
  std::vector<std::int64_t> pop;

  int size() const noexcept { return static_cast<int>(adj.size()); }

  /// Local graph from an explicit edge list. Empty `towns`/`pops` default to
  /// a single town and unit population.
  static SubGraph from_edges(int n, std::span<const Edge> edges, std::vector<int> towns = {},
                             std::vector<std::int64_t> pops = {});

  /// Induced subgraph on `units` (sorted ascending); local vertex i is units[i].
  static SubGraph induced(const DualGraph& graph, std::span<const int> units);
};

struct TreePolicy {
  enum class Kind { Uniform, RegionAware };
  Kind kind = Kind::Uniform;
  double surcharge = 2.0;

  static TreePolicy uniform() { return {}; }
  static TreePolicy region_aware(double surcharge = 2.0) { return {Kind::RegionAware, surcharge}; }
};

/// Spanning tree of a connected view with >= 2 vertices, as local edges.
/// Uniform: Wilson's loop-erased random walk, uniform over all spanning trees.
/// RegionAware: minimum spanning tree under w(e) = U(0,1) + surcharge * [e
/// crosses towns]. Throws NotConnected.
std::vector<Edge> random_spanning_tree(const SubGraph& view, const TreePolicy& policy, Rng& rng);

/// Tree edges whose removal leaves two parts each within epsilon * ideal of
/// ideal. One pass over subtree populations rooted at vertex 0.
std::vector<Edge> balanced_cut_candidates(std::span<const Edge> tree, std::span<const std::int64_t> pops,
                                          double ideal, double epsilon);

/// Vertices on the side of `cut` that contains vertex 0 (1 = that side).
std::vector<char> tree_side(int n, std::span<const Edge> tree, const Edge& cut);

enum class Acceptance { AlwaysAccept, SplitBounded, SplitStrict };

std::string_view to_string(Acceptance a);
std::optional<Acceptance> acceptance_from_string(std::string_view s);

struct ChainConfig {
  std::int64_t steps = 20000;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  TreePolicy tree_policy;
  Acceptance acceptance = Acceptance::SplitBounded;
  int max_tree_retries = 50;
  int max_pair_retries = 100;

  /// Throws InvalidConfig.
  void validate() const;
};

struct Proposal {
  std::optional<RecomMove> move;
  std::int64_t failed_tree_draws = 0;
  std::int64_t failed_pair_draws = 0;
};

/// One ReCom proposal: a uniformly random adjacent district pair, spanning
/// trees of their union until one has a balanced cut, a uniform candidate
/// edge. The side holding the lowest-indexed merged unit keeps district_a.
Proposal propose(const Plan& plan, const ChainConfig& config, Rng& rng);

struct ChainReport {
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_proposals = 0;
  std::int64_t no_proposal_steps = 0;
  std::int64_t failed_tree_draws = 0;
  std::int64_t failed_pair_draws = 0;
  std::vector<MetricRecord> records;
};

using MetricSink = std::function<void(const MetricRecord&)>;
using PlanObserver = std::function<void(const Plan&, const MetricRecord&)>;

/// Throws UnbalancedInitialPlan listing every district outside epsilon.
void check_balance(const Plan& plan, double epsilon);

/// Runs `config.steps` ReCom steps from `initial`, emitting one record per
/// step (the held state is recorded again after a rejection or when no
/// proposal exists). `stream` selects an independent RNG stream of the seed.
ChainReport run_chain(const Plan& initial, const ChainConfig& config, const MetricSink& sink = {},
                      const PlanObserver& observer = {}, std::uint64_t stream = 0);

/// Counters as a JSON object followed by one NDJSON line per record.
std::string chain_report_to_text(const ChainReport& report);

}  // namespace recom
