#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "recom/error.hpp"
#include "recom/recom_engine.hpp"

namespace recom {

std::string_view to_string(Acceptance a) {
  switch (a) {
    case Acceptance::AlwaysAccept: return "always";
    case Acceptance::SplitBounded: return "split-bounded";
    case Acceptance::SplitStrict: return "split-strict";
  }
  return "split-bounded";
}

std::optional<Acceptance> acceptance_from_string(std::string_view s) {
  if (s == "always") return Acceptance::AlwaysAccept;
  if (s == "split-bounded") return Acceptance::SplitBounded;
  if (s == "split-strict") return Acceptance::SplitStrict;
  return std::nullopt;
}

void ChainConfig::validate() const {
  // steps = 0 and epsilon = 0 are accepted: both appear in small exact cases.
  if (steps < 0) throw Error(ErrorKind::InvalidConfig, "steps", "must be non-negative");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorKind::InvalidConfig, "epsilon", "must lie in [0, 1)");
  if (tree_policy.kind == TreePolicy::Kind::RegionAware && !(tree_policy.surcharge > 0.0))
    throw Error(ErrorKind::InvalidConfig, "surcharge", "must be positive");
  if (max_tree_retries < 1) throw Error(ErrorKind::InvalidConfig, "max_tree_retries", "must be positive");
  if (max_pair_retries < 1) throw Error(ErrorKind::InvalidConfig, "max_pair_retries", "must be positive");
}

namespace {

double ideal_pop(const Plan& plan) {
  return static_cast<double>(plan.graph().total_pop()) / plan.num_districts();
}

std::vector<int> merged_units(const Plan& plan, int a, int b) {
  std::vector<int> out;
  auto ma = plan.members(a);
  auto mb = plan.members(b);
  out.reserve(ma.size() + mb.size());
  std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(out));
  return out;
}

bool accept(Acceptance policy, int proposed_splits, int current_splits) {
  switch (policy) {
    case Acceptance::AlwaysAccept: return true;
    case Acceptance::SplitBounded: return proposed_splits <= current_splits;
    case Acceptance::SplitStrict: return proposed_splits < current_splits;
  }
  return false;
}

}  // namespace

Proposal propose(const Plan& plan, const ChainConfig& config, Rng& rng) {
  Proposal out;
  const auto pairs = district_adjacency(plan);
  if (pairs.empty()) return out;
  const double ideal = ideal_pop(plan);

  for (int pair_try = 0; pair_try < config.max_pair_retries; ++pair_try) {
    const auto [a, b] = pairs[rng.below(pairs.size())];
    const auto units = merged_units(plan, a, b);
    const SubGraph view = SubGraph::induced(plan.graph(), units);

    for (int tree_try = 0; tree_try < config.max_tree_retries; ++tree_try) {
      const auto tree = random_spanning_tree(view, config.tree_policy, rng);
      const auto cuts = balanced_cut_candidates(tree, view.pop, ideal, config.epsilon);
      if (cuts.empty()) {
        ++out.failed_tree_draws;
        continue;
      }
      const Edge cut = cuts[rng.below(cuts.size())];
      const auto side = tree_side(view.size(), tree, cut);
      RecomMove move;
      move.district_a = a;
      move.district_b = b;
      for (int i = 0; i < view.size(); ++i)
        (side[static_cast<std::size_t>(i)] ? move.new_a : move.new_b).push_back(units[static_cast<std::size_t>(i)]);
      const int gu = units[static_cast<std::size_t>(cut.u)];
      const int gv = units[static_cast<std::size_t>(cut.v)];
      move.cut_edge = gu < gv ? Edge{gu, gv} : Edge{gv, gu};
      out.move = std::move(move);
      return out;
    }
    ++out.failed_pair_draws;
  }
  return out;
}

void check_balance(const Plan& plan, double epsilon) {
  const double ideal = ideal_pop(plan);
  std::vector<int> bad;
  for (int d = 1; d <= plan.num_districts(); ++d)
    if (std::abs(static_cast<double>(plan.aggregates(d).pop) - ideal) > epsilon * ideal) bad.push_back(d);
  if (bad.empty()) return;
  std::string list;
  for (int d : bad) list += (list.empty() ? "" : ",") + std::to_string(d);
  throw Error(ErrorKind::UnbalancedInitialPlan, "initial plan", "districts outside tolerance: " + list, bad);
}

ChainReport run_chain(const Plan& initial, const ChainConfig& config, const MetricSink& sink,
                      const PlanObserver& observer, std::uint64_t stream) {
  config.validate();
  check_balance(initial, config.epsilon);

  ChainReport report;
  report.records.reserve(static_cast<std::size_t>(config.steps));
  Rng rng(config.seed, stream);
  Plan current = initial;

  for (std::int64_t step = 1; step <= config.steps; ++step) {
    Proposal p = propose(current, config, rng);
    report.failed_tree_draws += p.failed_tree_draws;
    report.failed_pair_draws += p.failed_pair_draws;
    bool accepted = false;
    if (!p.move) {
      ++report.no_proposal_steps;
    } else {
      Plan proposed = apply_recom_move(current, *p.move);
      if (accept(config.acceptance, proposed.split_town_count(), current.split_town_count())) {
        current = std::move(proposed);
        accepted = true;
        ++report.accepted_steps;
      } else {
        ++report.rejected_proposals;
      }
    }
    MetricRecord record = compute_record(current, step, accepted);
    if (sink) sink(record);
    if (observer) observer(current, record);
    report.records.push_back(std::move(record));
  }
  return report;
}

std::string chain_report_to_text(const ChainReport& report) {
  nlohmann::json header = {{"accepted_steps", report.accepted_steps},
                           {"rejected_proposals", report.rejected_proposals},
                           {"no_proposal_steps", report.no_proposal_steps},
                           {"failed_tree_draws", report.failed_tree_draws},
                           {"failed_pair_draws", report.failed_pair_draws},
                           {"rng", Rng::kDescription}};
  std::ostringstream out;
  out << header.dump() << '\n';
  for (const auto& r : report.records) out << record_to_json(r) << '\n';
  return out.str();
}

}  // namespace recom
