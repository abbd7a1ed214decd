#ifndef COLLGRAM_REPORT_HPP
#define COLLGRAM_REPORT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "collgram/error.hpp"
#include "collgram/profiler.hpp"
#include "collgram/stats.hpp"

namespace collgram {

// ---------------------------------------------------------------------------
// Number formatting

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  // "-0.00" reads as a sign claim; print it unsigned.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string format_general(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

inline std::string format_fixed(const std::optional<double>& value, int decimals) {
  return value ? format_fixed(*value, decimals) : std::string();
}

inline std::string format_general(const std::optional<double>& value) {
  return value ? format_general(*value) : std::string();
}

// ---------------------------------------------------------------------------
// CSV

namespace csv {

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace csv

// ---------------------------------------------------------------------------
// Profiles

inline constexpr std::string_view kProfileHeader =
    "text_id,n_bigrams,n_attested,n_high_mi,n_high_t,pct_high_mi,pct_high_t";

/// A profile plus the group it belongs to (empty when not grouped).
struct ProfileRow {
  TextProfile profile;
  std::string group;
};

inline void write_profiles_csv(std::ostream& out, std::span<const ProfileRow> rows, int decimals,
                               bool with_group) {
  out << kProfileHeader << (with_group ? ",group" : "") << '\n';
  for (const auto& [p, group] : rows) {
    out << csv::quote(p.text_id) << ',' << p.n_bigrams << ',' << p.n_attested << ',' << p.n_high_mi
        << ',' << p.n_high_t << ',' << format_fixed(p.pct_high_mi, decimals) << ','
        << format_fixed(p.pct_high_t, decimals);
    if (with_group) out << ',' << csv::quote(group);
    out << '\n';
  }
}

inline nlohmann::ordered_json to_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline void write_profiles_json(std::ostream& out, std::span<const ProfileRow> rows, bool with_group) {
  auto array = nlohmann::ordered_json::array();
  for (const auto& [p, group] : rows) {
    nlohmann::ordered_json j;
    j["text_id"] = p.text_id;
    if (with_group) j["group"] = group;
    j["n_bigrams"] = p.n_bigrams;
    j["n_attested"] = p.n_attested;
    j["n_high_mi"] = p.n_high_mi;
    j["n_high_t"] = p.n_high_t;
    j["pct_high_mi"] = to_json(p.pct_high_mi);
    j["pct_high_t"] = to_json(p.pct_high_t);
    j["denominator"] = p.denominator_mode == DenominatorMode::all ? "all" : "attested";
    j["n_excluded"] = p.n_excluded;
    array.push_back(std::move(j));
  }
  out << array.dump(2) << '\n';
}

inline void write_profiles_markdown(std::ostream& out, std::span<const ProfileRow> rows, int decimals,
                                    bool with_group) {
  out << "| text_id |" << (with_group ? " group |" : "")
      << " bigrams | attested | high MI | high t | % high MI | % high t |\n";
  out << "|---|" << (with_group ? "---|" : "") << "---:|---:|---:|---:|---:|---:|\n";
  for (const auto& [p, group] : rows) {
    out << "| " << p.text_id << " |";
    if (with_group) out << ' ' << group << " |";
    out << ' ' << p.n_bigrams << " | " << p.n_attested << " | " << p.n_high_mi << " | "
        << p.n_high_t << " | " << format_fixed(p.pct_high_mi, decimals) << " | "
        << format_fixed(p.pct_high_t, decimals) << " |\n";
  }
}

namespace detail {

inline std::optional<double> parse_optional_double(const std::string& field, std::size_t line_no) {
  if (field.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, "bad number '" + field + "'");
  }
}

inline std::size_t parse_size(const std::string& field, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(line_no, "bad count '" + field + "'");
  }
}

}  // namespace detail

/// Reads profiles written by write_profiles_csv. The group column is
/// optional; count columns default to 0 when missing.
inline std::vector<ProfileRow> read_profiles_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty profile file");
  const auto header = csv::split(line);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };
  const auto id_col = column("text_id");
  const auto mi_col = column("pct_high_mi");
  const auto t_col = column("pct_high_t");
  if (!id_col || !mi_col || !t_col)
    throw ParseError(1, "profile header needs text_id, pct_high_mi and pct_high_t");
  const auto group_col = column("group");
  const std::pair<std::string_view, std::size_t TextProfile::*> counts[] = {
      {"n_bigrams", &TextProfile::n_bigrams},
      {"n_attested", &TextProfile::n_attested},
      {"n_high_mi", &TextProfile::n_high_mi},
      {"n_high_t", &TextProfile::n_high_t}};

  std::vector<ProfileRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    ProfileRow row;
    row.profile.text_id = fields[*id_col];
    row.profile.pct_high_mi = detail::parse_optional_double(fields[*mi_col], line_no);
    row.profile.pct_high_t = detail::parse_optional_double(fields[*t_col], line_no);
    for (const auto& [name, member] : counts)
      if (const auto c = column(name)) row.profile.*member = detail::parse_size(fields[*c], line_no);
    if (group_col) row.group = fields[*group_col];
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<ProfileRow> read_profiles_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("bad profile JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError(1, "profile JSON must be an array");
  std::vector<ProfileRow> rows;
  auto opt = [](const nlohmann::json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  try {
    for (const auto& item : j) {
      ProfileRow row;
      row.profile.text_id = item.at("text_id").get<std::string>();
      row.group = item.value("group", std::string());
      row.profile.n_bigrams = item.value("n_bigrams", std::size_t{0});
      row.profile.n_attested = item.value("n_attested", std::size_t{0});
      row.profile.n_high_mi = item.value("n_high_mi", std::size_t{0});
      row.profile.n_high_t = item.value("n_high_t", std::size_t{0});
      row.profile.pct_high_mi = opt(item.at("pct_high_mi"));
      row.profile.pct_high_t = opt(item.at("pct_high_t"));
      rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("bad profile JSON entry: ") + e.what());
  }
  return rows;
}

inline std::vector<ProfileRow> read_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile file '" + path.string() + "'");
  return path.extension() == ".json" ? read_profiles_json(in) : read_profiles_csv(in);
}

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
  std::string text_id;
  std::string group;
  std::filesystem::path path;
};

/// `text_id<TAB>group<TAB>path` per line; blank lines and `#` comments are
/// skipped. Relative paths resolve against `base`.
inline std::vector<ManifestEntry> read_manifest(std::istream& in, const std::filesystem::path& base = {}) {
  std::vector<ManifestEntry> entries;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty())
      throw ParseError(line_no, "manifest lines are text_id<TAB>group<TAB>path");
    ManifestEntry e{std::string(fields[0]), std::string(fields[1]), std::filesystem::path(fields[2])};
    if (e.path.is_relative() && !base.empty()) e.path = base / e.path;
    entries.push_back(std::move(e));
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Comparison outputs

inline std::string measure_label(Measure m) { return m == Measure::high_mi ? "High MI" : "High t-score"; }

inline constexpr double kStarAlpha = 0.0001;

inline void write_group_means_csv(std::ostream& out, std::span<const ComparisonTable> tables, int decimals) {
  out << "group,measure,mean,sd,n\n";
  for (const auto& table : tables)
    for (const auto& s : table.means)
      out << csv::quote(s.group) << ',' << to_string(s.measure) << ',' << format_fixed(s.mean, decimals)
          << ',' << format_fixed(s.sd, decimals) << ',' << s.n << '\n';
}

/// Group means with standard errors, one row per (measure, group), for
/// external charting.
inline void write_plot_data_csv(std::ostream& out, std::span<const ComparisonTable> tables, int decimals) {
  out << "measure,group,mean,se,n\n";
  for (const auto& table : tables)
    for (const auto& s : table.means)
      out << to_string(s.measure) << ',' << csv::quote(s.group) << ',' << format_fixed(s.mean, decimals)
          << ',' << format_fixed(s.standard_error(), decimals) << ',' << s.n << '\n';
}

inline void write_comparison_csv(std::ostream& out, std::span<const ComparisonTable> tables, int decimals) {
  out << "measure,row,col,mean_diff,t_stat,df,p_value,cohen_d_z,cohen_d_av,pct_same_sign,n,status\n";
  for (const auto& table : tables) {
    for (const auto& c : table.cells) {
      out << to_string(c.measure) << ',' << csv::quote(c.row) << ',' << csv::quote(c.col) << ','
          << format_fixed(c.mean_diff, decimals) << ',' << format_fixed(c.t_stat, decimals) << ','
          << (c.df ? std::to_string(*c.df) : "") << ',' << format_general(c.p_value) << ','
          << format_fixed(c.cohen_d_z, decimals) << ',' << format_fixed(c.cohen_d_av, decimals) << ','
          << format_fixed(c.pct_same_sign, decimals) << ',' << c.n << ',' << to_string(c.status) << '\n';
    }
  }
}

inline nlohmann::ordered_json comparison_json(std::span<const ComparisonTable> tables) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& table : tables) {
    auto cells = nlohmann::ordered_json::array();
    for (const auto& c : table.cells) {
      nlohmann::ordered_json cell;
      cell["row"] = c.row;
      cell["col"] = c.col;
      cell["mean_diff"] = to_json(c.mean_diff);
      cell["t_stat"] = to_json(c.t_stat);
      cell["df"] = c.df ? nlohmann::ordered_json(*c.df) : nlohmann::ordered_json(nullptr);
      cell["p_value"] = to_json(c.p_value);
      cell["cohen_d_z"] = to_json(c.cohen_d_z);
      cell["cohen_d_av"] = to_json(c.cohen_d_av);
      cell["pct_same_sign"] = to_json(c.pct_same_sign);
      cell["n"] = c.n;
      cell["status"] = std::string(to_string(c.status));
      cells.push_back(std::move(cell));
    }
    j[std::string(to_string(table.measure))] = std::move(cells);
  }
  return j;
}

inline nlohmann::ordered_json group_means_json(std::span<const ComparisonTable> tables) {
  auto array = nlohmann::ordered_json::array();
  for (const auto& table : tables)
    for (const auto& s : table.means)
      array.push_back({{"group", s.group},
                       {"measure", std::string(to_string(s.measure))},
                       {"mean", to_json(s.mean)},
                       {"sd", to_json(s.sd)},
                       {"n", s.n}});
  return array;
}

/// Group-means table: one row per measure, one column per group.
inline void write_group_means_markdown(std::ostream& out, std::span<const ComparisonTable> tables,
                                       int decimals) {
  if (tables.empty()) return;
  out << "| Measure |";
  for (const auto& g : tables.front().groups) out << ' ' << g << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < tables.front().groups.size(); ++i) out << "---:|";
  out << '\n';
  for (const auto& table : tables) {
    out << "| " << measure_label(table.measure) << " |";
    for (const auto& s : table.means) out << ' ' << format_fixed(s.mean, decimals) << " |";
    out << '\n';
  }
}

/// Triangular comparison: rows are groups 2..k, columns groups 1..k-1,
/// each cell shows D (row minus column), Es (d_z) and the same-sign %.
inline void write_comparison_markdown(std::ostream& out, std::span<const ComparisonTable> tables,
                                      int decimals) {
  if (tables.empty()) return;
  const auto& groups = tables.front().groups;
  const std::size_t k = groups.size();
  bool any_star = false;
  bool any_failed = false;
  out << "| |";
  for (std::size_t col = 0; col + 1 < k; ++col) out << ' ' << groups[col] << " D | Es | % |";
  out << "\n|---|";
  for (std::size_t col = 0; col + 1 < k; ++col) out << "---:|---:|---:|";
  out << '\n';
  for (const auto& table : tables) {
    out << "| **" << measure_label(table.measure) << "** |";
    for (std::size_t col = 0; col + 1 < k; ++col) out << " | | |";
    out << '\n';
    for (std::size_t row = 1; row < k; ++row) {
      out << "| " << groups[row] << " |";
      for (std::size_t col = 0; col + 1 < k; ++col) {
        if (col >= row) {
          out << " | | |";
          continue;
        }
        const auto& c = table.cell(row, col);
        if (c.status != CellStatus::ok) {
          any_failed = true;
          out << ' ' << format_fixed(c.mean_diff, decimals) << " | n/a | n/a |";
          continue;
        }
        const bool star = c.p_value && *c.p_value < kStarAlpha;
        any_star = any_star || star;
        out << ' ' << format_fixed(c.mean_diff, decimals) << (star ? "*" : "") << " | "
            << format_fixed(c.cohen_d_z, decimals) << " | " << format_fixed(c.pct_same_sign, decimals)
            << " |";
      }
      out << '\n';
    }
  }
  if (any_star) out << "\n\\* p < 0.0001 (two-tailed paired t-test)\n";
  if (any_failed) out << "\nn/a: degenerate or insufficient sample\n";
}

inline void write_report_markdown(std::ostream& out, std::span<const ComparisonTable> tables, int decimals) {
  out << "## Average percentages of highly collocational bigrams\n\n";
  write_group_means_markdown(out, tables, decimals);
  out << "\n## Differences (row minus column) and effect sizes\n\n";
  write_comparison_markdown(out, tables, decimals);
}

}  // namespace collgram

#endif  // COLLGRAM_REPORT_HPP
