#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "recom/graph_model.hpp"
#include "recom/partition.hpp"

namespace recom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConstraint = 3;

inline constexpr std::string_view kVersion = "0.1.0";

/// Runs the `recom` command line; args excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Per-plan summary with one entry per district.
std::string audit_json(const Plan& plan, int indent = 2);

/// Fixed-width table: D#, Pop., VAP W/H/B/A %, PL (omitted without votes), Towns.
std::string audit_table(const Plan& plan);

struct MarginRow {
  int district = 0;
  std::int64_t margin_votes = 0;
  double margin_pct = 0.0;  // fraction, sign kept as given
  Party incumbent_party = Party::Other;
};

/// Header `district,margin_votes,margin_pct,incumbent_party`.
std::vector<MarginRow> parse_margins_csv(std::string_view text);

/// Districts with |margin_pct| <= cut, ranked by |margin_pct| then district.
std::vector<MarginRow> select_competitive(std::vector<MarginRow> rows, double margin_cut);

/// Writes `contents` to `path` via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace recom::cli
