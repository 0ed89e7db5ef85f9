#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "recom/cli.hpp"
#include "recom/ensemble_stats.hpp"
#include "recom/error.hpp"
#include "recom/plan_diff.hpp"
#include "recom/recom_engine.hpp"

namespace recom::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct PlanInput {
  std::string graph;
  std::string assignment;
  int districts = 0;  // 0 = largest label
};

void add_plan_options(CLI::App* cmd, PlanInput& in) {
  cmd->add_option("--graph", in.graph, "graph JSON")->required();
  cmd->add_option("--assignment", in.assignment, "assignment CSV (unit_id,district)")->required();
  cmd->add_option("--districts", in.districts, "district count (default: largest label)")->check(CLI::PositiveNumber);
}

Plan load_plan(const GraphPtr& graph, const std::string& path, int districts) {
  Assignment labels = read_assignment(path, *graph);
  const int n = districts > 0 ? districts : *std::max_element(labels.begin(), labels.end());
  return plan_from_assignment(graph, std::move(labels), n);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, dir.string(), ec.message());
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, path.string(), "cannot open for writing");
  f << contents;
}

// ---- audit ----

struct AuditOptions {
  PlanInput in;
  std::string format = "table";
  std::string out_dir;
};

int cmd_audit(const AuditOptions& o, std::ostream& out) {
  const GraphPtr graph = load_graph(o.in.graph);
  const Plan plan = load_plan(graph, o.in.assignment, o.in.districts);
  const std::string json = audit_json(plan);
  const std::string table = audit_table(plan);
  if (!o.out_dir.empty()) {
    ensure_dir(o.out_dir);
    write_file(fs::path(o.out_dir) / "audit.json", json + "\n");
    write_file(fs::path(o.out_dir) / "audit_table.txt", table);
  }
  if (o.format == "json") {
    out << json << '\n';
  } else {
    char head[256];
    const auto inc = incumbent_distribution(plan);
    std::snprintf(head, sizeof head,
                  "pop_deviation %.4f%%  town_splits %d  majority_minority %d  incumbents zero/single/multi %d/%d/%d\n",
                  100.0 * pop_deviation(plan), town_splits(plan), majority_minority_count(plan), inc.zero, inc.single,
                  inc.multi);
    out << head;
    if (graph->total_votes() > 0.0) {
      const auto lean = partisan_lean(plan).counts;
      out << "lean safe_dem/safe_rep/competitive " << lean.safe_dem << '/' << lean.safe_rep << '/' << lean.competitive
          << '\n';
    }
    out << table;
  }
  return kExitOk;
}

// ---- chain ----

struct ChainOptions {
  PlanInput in;
  ChainConfig config;
  std::string tree = "uniform";
  std::string acceptance = "split-bounded";
  int chains = 1;
  std::string out_dir;
};

int cmd_chain(ChainOptions o, std::ostream& out) {
  if (o.tree == "region-aware")
    o.config.tree_policy.kind = TreePolicy::Kind::RegionAware;
  else
    o.config.tree_policy.kind = TreePolicy::Kind::Uniform;
  o.config.acceptance = *acceptance_from_string(o.acceptance);
  o.config.validate();

  const std::string start = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const std::string graph_bytes = read_file(o.in.graph);
  const GraphPtr graph = std::make_shared<const DualGraph>(parse_graph_json(graph_bytes));
  const Plan initial = load_plan(graph, o.in.assignment, o.in.districts);
  check_balance(initial, o.config.epsilon);

  ensure_dir(o.out_dir);
  std::vector<fs::path> paths;
  for (int i = 0; i < o.chains; ++i) paths.push_back(fs::path(o.out_dir) / ("chain_" + std::to_string(i) + ".ndjson"));

  std::vector<ChainReport> reports(static_cast<std::size_t>(o.chains));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(o.chains));
  auto work = [&](int i) {
    try {
      std::ofstream f(paths[static_cast<std::size_t>(i)], std::ios::binary | std::ios::trunc);
      if (!f) throw Error(ErrorKind::Io, paths[static_cast<std::size_t>(i)].string(), "cannot open for writing");
      auto sink = [&](const MetricRecord& r) { f << record_to_json(r) << '\n'; };
      reports[static_cast<std::size_t>(i)] = run_chain(initial, o.config, sink, {}, static_cast<std::uint64_t>(i));
      reports[static_cast<std::size_t>(i)].records.clear();
      if (!f.flush()) throw Error(ErrorKind::Io, paths[static_cast<std::size_t>(i)].string(), "write failed");
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (o.chains == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (int i = 0; i < o.chains; ++i) threads.emplace_back(work, i);
  }
  for (const auto& e : failures)
    if (e) std::rethrow_exception(e);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ordered_json m;
  m["version"] = kVersion;
  m["rng"] = Rng::kDescription;
  m["config"] = {{"steps", o.config.steps},
                 {"epsilon", o.config.epsilon},
                 {"seed", o.config.seed},
                 {"tree", o.tree},
                 {"surcharge", o.config.tree_policy.surcharge},
                 {"acceptance", o.acceptance},
                 {"max_tree_retries", o.config.max_tree_retries},
                 {"max_pair_retries", o.config.max_pair_retries},
                 {"chains", o.chains}};
  m["graph"] = {{"path", o.in.graph}, {"sha256", sha256_hex(graph_bytes)}};
  m["assignment"] = o.in.assignment;
  m["started_utc"] = start;
  m["finished_utc"] = utc_now();
  m["wall_seconds"] = wall;
  auto outputs = ordered_json::array();
  for (int i = 0; i < o.chains; ++i) {
    const auto& r = reports[static_cast<std::size_t>(i)];
    outputs.push_back({{"path", paths[static_cast<std::size_t>(i)].string()},
                       {"stream", i},
                       {"accepted_steps", r.accepted_steps},
                       {"rejected_proposals", r.rejected_proposals},
                       {"no_proposal_steps", r.no_proposal_steps},
                       {"failed_tree_draws", r.failed_tree_draws},
                       {"failed_pair_draws", r.failed_pair_draws}});
  }
  m["outputs"] = std::move(outputs);
  const fs::path manifest = fs::path(o.out_dir) / "manifest.json";
  write_file_atomic(manifest, m.dump(2) + "\n");
  out << manifest.string() << '\n';
  return kExitOk;
}

// ---- report ----

struct ReportOptions {
  std::vector<std::string> inputs;
  std::vector<std::string> metrics;
  std::vector<double> enacted;
  std::string graph;
  std::string assignment;
  int districts = 0;
  int bins = 40;
  std::size_t burn_in = 0;
  double percentile_cut = 99.0;
  std::string out_dir;
};

int cmd_report(const ReportOptions& o, std::ostream& out) {
  std::vector<MetricRecord> records;
  for (const auto& path : o.inputs) {
    auto part = parse_record_stream(read_file(path));
    if (part.size() <= o.burn_in)
      throw Error(ErrorKind::EmptyStream, path, "no records after burn-in of " + std::to_string(o.burn_in));
    records.insert(records.end(), part.begin() + static_cast<std::ptrdiff_t>(o.burn_in), part.end());
  }
  if (records.empty()) throw Error(ErrorKind::EmptyStream, "inputs");

  std::vector<std::string> metrics = o.metrics;
  if (metrics.empty())
    for (auto name : metric_names())
      if (records.front().lean_counts || (name != "safe_dem" && name != "safe_rep" && name != "competitive"))
        metrics.emplace_back(name);

  std::vector<double> enacted = o.enacted;
  if (enacted.empty()) {
    if (o.graph.empty() || o.assignment.empty())
      throw Error(ErrorKind::InvalidConfig, "enacted", "give --enacted values or --graph with --assignment");
    const GraphPtr graph = load_graph(o.graph);
    const MetricRecord rec = compute_record(load_plan(graph, o.assignment, o.districts), 0, true);
    for (const auto& m : metrics) enacted.push_back(metric_value(rec, m));
  }
  if (enacted.size() != metrics.size())
    throw Error(ErrorKind::InvalidConfig, "enacted", "one --enacted value per --metric");

  auto all = ordered_json::array();
  if (!o.out_dir.empty()) ensure_dir(o.out_dir);
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %8s %12s %12s %12s %10s  %s\n", "metric", "count", "mean", "stddev", "enacted",
                "pctile", "verdict");
  std::string table = line;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const EnsembleSummary s = summarize(records, metrics[i], enacted[i], o.bins);
    all.push_back(ordered_json::parse(summary_to_json(s, o.percentile_cut, -1)));
    if (!o.out_dir.empty()) write_file(fs::path(o.out_dir) / ("histogram_" + metrics[i] + ".csv"), histogram_csv(s));
    std::snprintf(line, sizeof line, "%-28s %8lld %12.6g %12.6g %12.6g %10.3f  %s\n", metrics[i].c_str(),
                  static_cast<long long>(s.count), s.mean, s.stddev, s.enacted_value, s.enacted_percentile,
                  std::string(to_string(outlier_verdict(s, o.percentile_cut))).c_str());
    table += line;
  }
  if (!o.out_dir.empty()) {
    write_file(fs::path(o.out_dir) / "summary.json", all.dump(2) + "\n");
    out << table;
  } else {
    out << all.dump(2) << '\n';
  }
  return kExitOk;
}

// ---- compare ----

struct CompareOptions {
  std::string graph;
  std::string old_assignment;
  std::string new_assignment;
  std::string margins;
  int districts = 0;
  double margin_cut = 0.025;
  double neutral_band = 0.02;
  bool match_by_overlap = false;
  std::string out;
};

ordered_json change_summary(const DualGraph& g, const ChangeSet& s) {
  auto towns = ordered_json::array();
  for (const auto& t : s.towns)
    towns.push_back({{"town", g.town_name(t.town)}, {"extent", t.whole ? "all" : "part"}, {"units", t.units},
                     {"pop", t.pop}});
  auto units = ordered_json::array();
  for (int u : s.units) units.push_back(g.unit(u).id);
  return {{"towns", std::move(towns)}, {"units", std::move(units)}, {"pop", s.pop},
          {"dem_votes", s.dem_votes}, {"rep_votes", s.rep_votes}};
}

int cmd_compare(const CompareOptions& o, std::ostream& out) {
  const GraphPtr graph = load_graph(o.graph);
  const Plan old_plan = load_plan(graph, o.old_assignment, o.districts);
  const Plan new_plan = load_plan(graph, o.new_assignment, o.districts);
  const auto rows = select_competitive(parse_margins_csv(read_file(o.margins)), o.margin_cut);
  const PlanDiff diff = o.match_by_overlap ? diff_plans(old_plan, new_plan, match_by_overlap(old_plan, new_plan))
                                           : diff_plans(old_plan, new_plan);

  ordered_json j;
  j["margin_cut"] = o.margin_cut;
  j["neutral_band"] = o.neutral_band;
  j["matching"] = o.match_by_overlap ? "overlap" : "label";
  auto items = ordered_json::array();
  int rank = 0;
  for (const auto& r : rows) {
    if (r.district > static_cast<int>(diff.districts.size()))
      throw Error(ErrorKind::SchemaViolation, "margins district " + std::to_string(r.district), "not in plans");
    const DistrictDiff& d = diff.district(r.district);
    ordered_json item;
    item["rank"] = ++rank;
    item["district"] = r.district;
    item["margin_votes"] = r.margin_votes;
    item["margin_pct"] = r.margin_pct;
    item["incumbent_party"] = party_code(r.incumbent_party);
    try {
      const ChangeClass c = classify_change(d, r.incumbent_party, o.neutral_band);
      item["classification"] = to_string(c);
      item["effect"] = c == ChangeClass::InsufficientData ? ordered_json(nullptr)
                                                           : ordered_json(change_effect(d, r.incumbent_party));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoVotesOnChangedUnits) throw;
      item["classification"] = to_string(ChangeClass::InsufficientData);
      item["effect"] = nullptr;
    }
    item["unchanged"] = d.empty();
    item["additions"] = change_summary(*graph, d.additions);
    item["subtractions"] = change_summary(*graph, d.subtractions);
    items.push_back(std::move(item));
  }
  j["districts"] = std::move(items);
  const std::string text = j.dump(2) + "\n";
  if (o.out.empty())
    out << text;
  else
    write_file_atomic(o.out, text);
  return kExitOk;
}

// ---- borders ----

int cmd_borders(const PlanInput& in, const std::string& out_path, std::ostream& out) {
  const GraphPtr graph = load_graph(in.graph);
  const Plan plan = load_plan(graph, in.assignment, in.districts);
  const std::string text = borders_to_json(plan, flag_borders(plan)) + "\n";
  if (out_path.empty())
    out << text;
  else
    write_file_atomic(out_path, text);
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::UnbalancedInitialPlan ? kExitConstraint : kExitInput;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ReCom ensemble sampling, plan audits and plan comparison", "recom"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  AuditOptions audit;
  auto* audit_cmd = app.add_subcommand("audit", "metrics and district table for one plan");
  add_plan_options(audit_cmd, audit.in);
  audit_cmd->add_option("--format", audit.format, "stdout format")->check(CLI::IsMember({"table", "json"}));
  audit_cmd->add_option("--out-dir", audit.out_dir, "also write audit.json and audit_table.txt here");

  ChainOptions chain;
  auto* chain_cmd = app.add_subcommand("chain", "run ReCom chains and write NDJSON metric streams");
  add_plan_options(chain_cmd, chain.in);
  chain_cmd->add_option("--steps", chain.config.steps, "steps per chain")->check(CLI::NonNegativeNumber);
  chain_cmd->add_option("--seed", chain.config.seed, "64-bit seed");
  chain_cmd->add_option("--epsilon", chain.config.epsilon, "per-district population tolerance");
  chain_cmd->add_option("--tree", chain.tree, "spanning tree policy")->check(CLI::IsMember({"uniform", "region-aware"}));
  chain_cmd->add_option("--surcharge", chain.config.tree_policy.surcharge, "region-aware cross-town surcharge");
  chain_cmd->add_option("--acceptance", chain.acceptance, "acceptance rule")
      ->check(CLI::IsMember({"always", "split-bounded", "split-strict"}));
  chain_cmd->add_option("--max-tree-retries", chain.config.max_tree_retries)->check(CLI::PositiveNumber);
  chain_cmd->add_option("--max-pair-retries", chain.config.max_pair_retries)->check(CLI::PositiveNumber);
  chain_cmd->add_option("--chains", chain.chains, "independent chains (RNG streams 0..N-1)")->check(CLI::Range(1, 256));
  chain_cmd->add_option("--out-dir", chain.out_dir, "output directory")->required();

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "summarize NDJSON streams against enacted values");
  report_cmd->add_option("--input", report.inputs, "NDJSON metric stream (repeatable)")->required();
  report_cmd->add_option("--metric", report.metrics, "metric name (repeatable; default all)");
  report_cmd->add_option("--enacted", report.enacted, "enacted value per --metric, in order");
  report_cmd->add_option("--graph", report.graph, "graph JSON for computing enacted values");
  report_cmd->add_option("--assignment", report.assignment, "enacted assignment CSV");
  report_cmd->add_option("--districts", report.districts)->check(CLI::PositiveNumber);
  report_cmd->add_option("--bins", report.bins, "histogram bins")->check(CLI::PositiveNumber);
  report_cmd->add_option("--burn-in", report.burn_in, "records dropped from the start of each input");
  report_cmd->add_option("--percentile-cut", report.percentile_cut, "outlier percentile cut")
      ->check(CLI::Range(50.0, 100.0));
  report_cmd->add_option("--out-dir", report.out_dir, "write summary.json and histogram CSVs here");

  CompareOptions compare;
  auto* compare_cmd = app.add_subcommand("compare", "diff two plans for competitive districts");
  compare_cmd->add_option("--graph", compare.graph)->required();
  compare_cmd->add_option("--old", compare.old_assignment, "previous plan assignment CSV")->required();
  compare_cmd->add_option("--new", compare.new_assignment, "new plan assignment CSV")->required();
  compare_cmd->add_option("--margins", compare.margins, "margins CSV")->required();
  compare_cmd->add_option("--districts", compare.districts)->check(CLI::PositiveNumber);
  compare_cmd->add_option("--margin-cut", compare.margin_cut, "max |margin_pct| as a fraction");
  compare_cmd->add_option("--neutral-band", compare.neutral_band, "classification neutral band");
  compare_cmd->add_flag("--match-by-overlap", compare.match_by_overlap, "match renumbered districts by population");
  compare_cmd->add_option("--out", compare.out, "output JSON path (default stdout)");

  PlanInput borders;
  std::string borders_out;
  auto* borders_cmd = app.add_subcommand("borders", "flag in-town district borders at incumbents' home units");
  add_plan_options(borders_cmd, borders);
  borders_cmd->add_option("--out", borders_out, "output JSON path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "recom: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*audit_cmd) return cmd_audit(audit, out);
    if (*chain_cmd) return cmd_chain(chain, out);
    if (*report_cmd) return cmd_report(report, out);
    if (*compare_cmd) return cmd_compare(compare, out);
    if (*borders_cmd) return cmd_borders(borders, borders_out, out);
  } catch (const Error& e) {
    err << "recom: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "recom: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace recom::cli
