#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recom/metrics.hpp"

namespace recom {

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::int64_t count = 0;
};

struct EnsembleSummary {
  std::string metric;
  std::int64_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<HistogramBin> histogram;
  double enacted_value = 0.0;
  double enacted_percentile = 0.0;
  std::optional<double> z_score;  // empty when stddev == 0
};

/// Metric names accepted by metric_value and summarize.
std::span<const std::string_view> metric_names();

/// Scalar `metric` of a record. Lean counts are named safe_dem, safe_rep and
/// competitive. Throws UnknownMetric for unknown names or an absent lean block.
double metric_value(const MetricRecord& record, std::string_view metric);

/// Summary of `values` against `enacted`. Values are sorted first, so the
/// result does not depend on input order. Throws EmptyStream.
EnsembleSummary summarize_values(std::vector<double> values, std::string_view metric, double enacted,
                                 int bins = 40);

/// summarize_values over records[burn_in..]. Throws EmptyStream, UnknownMetric.
EnsembleSummary summarize(std::span<const MetricRecord> records, std::string_view metric, double enacted,
                          int bins = 40, std::size_t burn_in = 0);

/// 100 * (#below + 0.5 * #equal) / count over a sorted sample.
double midrank_percentile(std::span<const double> sorted, double value);

enum class Verdict { Outlier, NotOutlier };

std::string_view to_string(Verdict v);

/// Outlier iff the percentile is >= cut or <= 100 - cut.
Verdict outlier_verdict(const EnsembleSummary& summary, double percentile_cut = 99.0);

/// `bin_low,bin_high,count` with one row per bin.
std::string histogram_csv(const EnsembleSummary& summary);

/// Summary object with all fields; `verdict` and `percentile_cut` are added
/// when given.
std::string summary_to_json(const EnsembleSummary& summary, std::optional<double> percentile_cut = std::nullopt,
                            int indent = 2);

/// Parses an NDJSON metric stream; blank lines are skipped.
std::vector<MetricRecord> parse_record_stream(std::string_view text);

}  // namespace recom
