#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "recom/ensemble_stats.hpp"
#include "recom/error.hpp"

namespace recom {

namespace {

constexpr std::array<std::string_view, 10> kMetrics = {
    "single_incumbent_frac", "districts_single_incumbent", "districts_zero_incumbent",
    "districts_multi_incumbent", "town_splits", "pop_deviation", "majority_minority_count",
    "safe_dem", "safe_rep", "competitive"};

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::span<const std::string_view> metric_names() { return kMetrics; }

double metric_value(const MetricRecord& r, std::string_view metric) {
  if (metric == "single_incumbent_frac") return r.single_incumbent_frac;
  if (metric == "districts_single_incumbent") return r.districts_single_incumbent;
  if (metric == "districts_zero_incumbent") return r.districts_zero_incumbent;
  if (metric == "districts_multi_incumbent") return r.districts_multi_incumbent;
  if (metric == "town_splits") return r.town_splits;
  if (metric == "pop_deviation") return r.pop_deviation;
  if (metric == "majority_minority_count") return r.majority_minority_count;
  if (metric == "safe_dem" || metric == "safe_rep" || metric == "competitive") {
    if (!r.lean_counts) throw Error(ErrorKind::UnknownMetric, std::string(metric), "record has no lean_counts");
    if (metric == "safe_dem") return r.lean_counts->safe_dem;
    if (metric == "safe_rep") return r.lean_counts->safe_rep;
    return r.lean_counts->competitive;
  }
  throw Error(ErrorKind::UnknownMetric, std::string(metric));
}

double midrank_percentile(std::span<const double> sorted, double value) {
  if (sorted.empty()) return 0.0;
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), value);
  const auto hi = std::upper_bound(lo, sorted.end(), value);
  const double below = static_cast<double>(lo - sorted.begin());
  const double equal = static_cast<double>(hi - lo);
  return 100.0 * (below + 0.5 * equal) / static_cast<double>(sorted.size());
}

EnsembleSummary summarize_values(std::vector<double> values, std::string_view metric, double enacted, int bins) {
  if (values.empty()) throw Error(ErrorKind::EmptyStream, std::string(metric));
  if (bins < 1) throw Error(ErrorKind::InvalidConfig, "bins", "must be positive");
  std::sort(values.begin(), values.end());

  EnsembleSummary s;
  s.metric = std::string(metric);
  s.count = static_cast<std::int64_t>(values.size());
  s.min = values.front();
  s.max = values.back();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(s.count));

  if (s.min == s.max) {
    s.histogram.push_back({s.min, s.max, s.count});
  } else {
    const double width = (s.max - s.min) / bins;
    s.histogram.resize(static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) {
      s.histogram[static_cast<std::size_t>(i)].low = s.min + i * width;
      s.histogram[static_cast<std::size_t>(i)].high = i + 1 == bins ? s.max : s.min + (i + 1) * width;
    }
    for (double v : values) {
      auto idx = static_cast<int>(std::floor((v - s.min) / width));
      idx = std::clamp(idx, 0, bins - 1);
      // Keep each value inside its bin's printed bounds despite rounding.
      while (idx > 0 && v < s.histogram[static_cast<std::size_t>(idx)].low) --idx;
      while (idx + 1 < bins && v >= s.histogram[static_cast<std::size_t>(idx + 1)].low) ++idx;
      ++s.histogram[static_cast<std::size_t>(idx)].count;
    }
  }

  s.enacted_value = enacted;
  s.enacted_percentile = midrank_percentile(values, enacted);
  if (s.stddev > 0.0) s.z_score = (enacted - s.mean) / s.stddev;
  return s;
}

EnsembleSummary summarize(std::span<const MetricRecord> records, std::string_view metric, double enacted, int bins,
                          std::size_t burn_in) {
  if (std::find(kMetrics.begin(), kMetrics.end(), metric) == kMetrics.end())
    throw Error(ErrorKind::UnknownMetric, std::string(metric));
  if (burn_in >= records.size())
    throw Error(ErrorKind::EmptyStream, std::string(metric),
                "no records left after burn-in of " + std::to_string(burn_in));
  std::vector<double> values;
  values.reserve(records.size() - burn_in);
  for (std::size_t i = burn_in; i < records.size(); ++i) values.push_back(metric_value(records[i], metric));
  return summarize_values(std::move(values), metric, enacted, bins);
}

std::string_view to_string(Verdict v) { return v == Verdict::Outlier ? "outlier" : "not_outlier"; }

Verdict outlier_verdict(const EnsembleSummary& summary, double percentile_cut) {
  const double p = summary.enacted_percentile;
  return (p >= percentile_cut || p <= 100.0 - percentile_cut) ? Verdict::Outlier : Verdict::NotOutlier;
}

std::string histogram_csv(const EnsembleSummary& summary) {
  std::string out = "bin_low,bin_high,count\n";
  for (const auto& b : summary.histogram)
    out += format_number(b.low) + "," + format_number(b.high) + "," + std::to_string(b.count) + "\n";
  return out;
}

std::string summary_to_json(const EnsembleSummary& s, std::optional<double> percentile_cut, int indent) {
  nlohmann::ordered_json j;
  j["metric"] = s.metric;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["stddev"] = s.stddev;
  j["min"] = s.min;
  j["max"] = s.max;
  auto hist = nlohmann::ordered_json::array();
  for (const auto& b : s.histogram) hist.push_back({{"bin_low", b.low}, {"bin_high", b.high}, {"count", b.count}});
  j["histogram"] = std::move(hist);
  j["enacted_value"] = s.enacted_value;
  j["enacted_percentile"] = s.enacted_percentile;
  j["z_score"] = s.z_score ? nlohmann::ordered_json(*s.z_score) : nlohmann::ordered_json(nullptr);
  j["z_score_defined"] = s.z_score.has_value();
  if (percentile_cut) {
    j["percentile_cut"] = *percentile_cut;
    j["verdict"] = to_string(outlier_verdict(s, *percentile_cut));
    j["verdict_rule"] = "outlier iff enacted_percentile >= cut or <= 100 - cut (mid-rank percentile)";
  }
  return j.dump(indent);
}

std::vector<MetricRecord> parse_record_stream(std::string_view text) {
  std::vector<MetricRecord> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      out.push_back(record_from_json(line));
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line_no), e.what());
    }
  }
  return out;
}

}  // namespace recom
