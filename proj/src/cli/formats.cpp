#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "recom/cli.hpp"
#include "recom/error.hpp"
#include "recom/metrics.hpp"

namespace recom::cli {

namespace {

double pct(std::int64_t part, std::int64_t whole) {
  return whole > 0 ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string with_commas(std::int64_t v) {
  std::string digits = std::to_string(v < 0 ? -v : v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return v < 0 ? "-" + out : out;
}

// Towns of a district, largest share of the district first.
std::vector<std::string> district_towns(const Plan& plan, int d) {
  const DualGraph& g = plan.graph();
  std::map<int, std::int64_t> pop;
  for (int u : plan.members(d)) pop[g.town_of(u)] += g.unit(u).pop;
  std::vector<std::pair<std::int64_t, int>> order;
  for (const auto& [town, p] : pop) order.emplace_back(p, town);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> out;
  for (const auto& [p, town] : order) out.push_back(g.town_name(town));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Io, "sha256", "digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string audit_json(const Plan& plan, int indent) {
  using nlohmann::ordered_json;
  const DualGraph& g = plan.graph();
  const int n = plan.num_districts();
  const bool has_votes = g.total_votes() > 0.0;
  const auto inc = incumbent_distribution(plan);
  std::optional<PartisanLean> lean;
  if (has_votes) lean = partisan_lean(plan);

  int max_d = 1;
  int min_d = 1;
  for (int d = 2; d <= n; ++d) {
    if (plan.aggregates(d).pop > plan.aggregates(max_d).pop) max_d = d;
    if (plan.aggregates(d).pop < plan.aggregates(min_d).pop) min_d = d;
  }

  ordered_json j;
  j["units"] = g.num_units();
  j["districts"] = n;
  j["total_pop"] = g.total_pop();
  j["ideal_pop"] = static_cast<double>(g.total_pop()) / n;
  j["max_pop"] = {{"district", max_d}, {"pop", plan.aggregates(max_d).pop}};
  j["min_pop"] = {{"district", min_d}, {"pop", plan.aggregates(min_d).pop}};
  j["pop_deviation"] = pop_deviation(plan);
  j["incumbents"] = {{"total", g.total_incumbents()},
                     {"districts_zero", inc.zero},
                     {"districts_single", inc.single},
                     {"districts_multi", inc.multi},
                     {"districts_with_any", inc.single + inc.multi},
                     {"single_fraction", inc.single_fraction}};
  j["town_splits"] = town_splits(plan);
  j["majority_minority_count"] = majority_minority_count(plan);
  if (lean)
    j["lean_counts"] = {{"safe_dem", lean->counts.safe_dem},
                        {"safe_rep", lean->counts.safe_rep},
                        {"competitive", lean->counts.competitive}};

  auto rows = ordered_json::array();
  for (int d = 1; d <= n; ++d) {
    const Aggregates& a = plan.aggregates(d);
    ordered_json row;
    row["district"] = d;
    row["pop"] = a.pop;
    row["vap_total"] = a.vap_total;
    row["vap_white_pct"] = pct(a.vap_white, a.vap_total);
    row["vap_hispanic_pct"] = pct(a.vap_hispanic, a.vap_total);
    row["vap_black_pct"] = pct(a.vap_black, a.vap_total);
    row["vap_asian_pct"] = pct(a.vap_asian, a.vap_total);
    if (lean) {
      row["dem_share"] = lean->dem_share[static_cast<std::size_t>(d - 1)];
      row["lean"] = to_string(lean->lean[static_cast<std::size_t>(d - 1)]);
    }
    auto incs = ordered_json::array();
    for (const auto& i : a.incumbents)
      incs.push_back({{"name", i.name}, {"party", party_code(i.party)}, {"home_unit", i.home_unit}});
    row["incumbents"] = std::move(incs);
    row["towns"] = district_towns(plan, d);
    rows.push_back(std::move(row));
  }
  j["district_table"] = std::move(rows);
  return j.dump(indent);
}

std::string audit_table(const Plan& plan) {
  const bool has_votes = plan.graph().total_votes() > 0.0;
  std::optional<PartisanLean> lean;
  if (has_votes) lean = partisan_lean(plan);
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%4s  %8s  %7s  %7s  %7s  %7s", "D#", "Pop.", "VAP W%", "VAP H%", "VAP B%", "VAP A%");
  out << buf << (has_votes ? "  PL     " : "") << "  Towns\n";
  for (int d = 1; d <= plan.num_districts(); ++d) {
    const Aggregates& a = plan.aggregates(d);
    std::snprintf(buf, sizeof buf, "%4d  %8s  %6s%%  %6s%%  %6s%%  %6s%%", d, with_commas(a.pop).c_str(),
                  fixed(pct(a.vap_white, a.vap_total), 1).c_str(), fixed(pct(a.vap_hispanic, a.vap_total), 1).c_str(),
                  fixed(pct(a.vap_black, a.vap_total), 1).c_str(), fixed(pct(a.vap_asian, a.vap_total), 1).c_str());
    out << buf;
    if (lean) {
      const double dem = lean->dem_share[static_cast<std::size_t>(d - 1)];
      const bool dem_lead = dem >= 0.5;
      const double lead = std::round(100.0 * (dem_lead ? dem : 1.0 - dem));
      std::snprintf(buf, sizeof buf, "  %3.0f%% %c", lead, dem_lead ? 'D' : 'R');
      out << buf << "  ";
    }
    const auto towns = district_towns(plan, d);
    out << "  ";
    for (std::size_t i = 0; i < towns.size(); ++i) out << (i ? ", " : "") << towns[i];
    out << '\n';
  }
  return out.str();
}

std::vector<MarginRow> parse_margins_csv(std::string_view text) {
  std::vector<MarginRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (!header_seen) {
      if (cells != std::vector<std::string>{"district", "margin_votes", "margin_pct", "incumbent_party"})
        throw Error(ErrorKind::SchemaViolation, "margins header",
                    "expected district,margin_votes,margin_pct,incumbent_party");
      header_seen = true;
      continue;
    }
    const std::string where = "margins line " + std::to_string(line_no);
    if (cells.size() != 4) throw Error(ErrorKind::MalformedFile, where, "expected 4 fields");
    MarginRow r;
    try {
      std::size_t used = 0;
      r.district = std::stoi(cells[0], &used);
      if (used != cells[0].size() || r.district <= 0) throw std::invalid_argument("district");
      r.margin_votes = std::stoll(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("margin_votes");
      r.margin_pct = std::stod(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("margin_pct");
    } catch (const std::exception&) {
      throw Error(ErrorKind::MalformedFile, where, "bad number");
    }
    auto party = party_from_code(cells[3]);
    if (!party) throw Error(ErrorKind::SchemaViolation, where, "party must be D, R or O");
    r.incumbent_party = *party;
    rows.push_back(r);
  }
  if (!header_seen) throw Error(ErrorKind::SchemaViolation, "margins", "empty file");
  return rows;
}

std::vector<MarginRow> select_competitive(std::vector<MarginRow> rows, double margin_cut) {
  std::erase_if(rows, [&](const MarginRow& r) { return std::abs(r.margin_pct) > margin_cut; });
  std::stable_sort(rows.begin(), rows.end(), [](const MarginRow& a, const MarginRow& b) {
    const double ma = std::abs(a.margin_pct);
    const double mb = std::abs(b.margin_pct);
    return ma != mb ? ma < mb : a.district < b.district;
  });
  return rows;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::Io, tmp.string(), "cannot open for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) throw Error(ErrorKind::Io, tmp.string(), "write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, path.string(), ec.message());
}

}  // namespace recom::cli
