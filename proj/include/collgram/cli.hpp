#ifndef COLLGRAM_CLI_HPP
#define COLLGRAM_CLI_HPP

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collgram/association.hpp"
#include "collgram/corpus_index.hpp"
#include "collgram/error.hpp"
#include "collgram/profiler.hpp"
#include "collgram/report.hpp"
#include "collgram/stats.hpp"
#include "collgram/token.hpp"

namespace collgram::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kData = 2, kDegenerate = 3 };

struct UsageError : Error {
  using Error::Error;
};

struct RunConfig {
  double mi_threshold = 5.0;
  double t_threshold = 6.0;
  std::string denominator = "all";
  std::string fold = "on";
  std::string n_basis = "tokens";
  Count min_count = 1;
  std::string format = "csv";
  int decimals = 2;
  std::string tagged = "plain";
  std::vector<std::string> exclude_tags{"NP", "MC"};

  bool fold_case() const { return fold == "on"; }

  ProfileConfig profile_config() const {
    if (!std::isfinite(mi_threshold) || !std::isfinite(t_threshold))
      throw UsageError("thresholds must be finite");
    ProfileConfig c;
    c.thresholds = {mi_threshold, t_threshold};
    c.denominator = denominator == "all" ? DenominatorMode::all : DenominatorMode::attested;
    c.n_basis = n_basis == "tokens" ? NBasis::tokens : NBasis::bigrams;
    c.policy.fold_case = fold_case();
    c.policy.exclude_tag_prefixes = exclude_tags;
    return c;
  }
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<Token> read_tokens(const std::filesystem::path& path, const std::string& format) {
  if (format == "plain") return tokenize_plain(read_file(path));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  try {
    return parse_tagged(in, format == "vertical" ? TaggedFormat::vertical : TaggedFormat::underscore);
  } catch (const ParseError& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

inline void add_scoring_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--mi-threshold", cfg.mi_threshold, "Minimum MI for a highly collocational bigram")
      ->capture_default_str();
  app.add_option("--t-threshold", cfg.t_threshold, "Minimum t-score for a highly collocational bigram")
      ->capture_default_str();
  app.add_option("--denominator", cfg.denominator, "Percentage denominator")
      ->check(CLI::IsMember({"all", "attested"}))
      ->capture_default_str();
  app.add_option("--n-basis", cfg.n_basis, "Corpus total used as N in E = f1*f2/N")
      ->check(CLI::IsMember({"tokens", "bigrams"}))
      ->capture_default_str();
  app.add_option("--exclude-tags", cfg.exclude_tags, "Tag prefixes whose bigrams are dropped")
      ->delimiter(',')
      ->allow_extra_args(false)
      ->capture_default_str();
}

inline void add_input_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--fold-case", cfg.fold, "Lowercase words before counting/lookup")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  app.add_option("--tagged", cfg.tagged, "Input format")
      ->check(CLI::IsMember({"vertical", "underscore", "plain"}))
      ->capture_default_str();
}

inline void add_output_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "markdown"}))
      ->capture_default_str();
  app.add_option("--decimals", cfg.decimals, "Decimals for percentages and statistics")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes to `path`, or to `fallback` when path is empty.
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// index build / index info

struct IndexBuildArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string source;
  bool stamp = false;
};

inline int cmd_index_build(const IndexBuildArgs& args, const RunConfig& cfg, std::ostream& out) {
  if (args.inputs.empty()) throw UsageError("index build needs at least one corpus file");
  if (args.output.empty()) throw UsageError("index build needs --output (or COLLGRAM_INDEX)");
  if (cfg.min_count < 1) throw UsageError("--min-count must be at least 1");

  BuildConfig bc;
  bc.fold_case = cfg.fold_case();
  bc.min_count = cfg.min_count;
  if (!args.source.empty()) {
    bc.source = args.source;
  } else {
    for (const auto& p : args.inputs) bc.source += (bc.source.empty() ? "" : " ") + p;
  }
  if (args.stamp) bc.built = detail::utc_now();

  IndexBuilder builder(bc);
  for (const auto& path : args.inputs) {
    builder.add(detail::read_tokens(path, cfg.tagged));
    builder.interrupt();
  }
  const CorpusIndex index = builder.build();
  save_index(index, args.output);
  out << "tokens=" << index.total_tokens() << " bigrams=" << index.total_bigrams()
      << " vocabulary=" << index.vocabulary_size() << " bigram_types=" << index.bigram_types() << '\n';
  return kSuccess;
}

inline int cmd_index_info(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  if (path.empty()) throw UsageError("index info needs an index path (or COLLGRAM_INDEX)");
  const CorpusIndex index = load_index(path);
  const auto& meta = index.metadata();
  if (cfg.format == "json") {
    nlohmann::ordered_json j;
    j["format_version"] = meta.format_version;
    j["tokens"] = index.total_tokens();
    j["bigrams"] = index.total_bigrams();
    j["fold_case"] = meta.fold_case;
    j["vocabulary"] = index.vocabulary_size();
    j["bigram_types"] = index.bigram_types();
    j["source"] = meta.source;
    j["built"] = meta.built ? nlohmann::ordered_json(*meta.built) : nlohmann::ordered_json(nullptr);
    out << j.dump(2) << '\n';
    return kSuccess;
  }
  out << "format_version=" << meta.format_version << '\n'
      << "tokens=" << index.total_tokens() << '\n'
      << "bigrams=" << index.total_bigrams() << '\n'
      << "fold_case=" << (meta.fold_case ? "on" : "off") << '\n'
      << "vocabulary=" << index.vocabulary_size() << '\n'
      << "bigram_types=" << index.bigram_types() << '\n'
      << "source=" << meta.source << '\n';
  if (meta.built) out << "built=" << *meta.built << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------
// profile

struct ProfileArgs {
  std::string index;
  std::string manifest;
  std::vector<std::string> texts;
  std::string output;
};

inline int cmd_profile(const ProfileArgs& args, const RunConfig& cfg, std::ostream& out,
                       std::ostream& err) {
  if (args.index.empty()) throw UsageError("profile needs --index (or COLLGRAM_INDEX)");
  if (args.manifest.empty() && args.texts.empty())
    throw UsageError("profile needs text files or --manifest");
  const ProfileConfig config = cfg.profile_config();

  std::vector<ManifestEntry> entries;
  if (!args.manifest.empty()) {
    std::ifstream in(args.manifest);
    if (!in) throw Error("cannot read manifest '" + args.manifest + "'");
    entries = read_manifest(in, std::filesystem::path(args.manifest).parent_path());
  }
  for (const auto& t : args.texts)
    entries.push_back({std::filesystem::path(t).stem().string(), std::string(), t});
  const bool grouped = !args.manifest.empty();

  const CorpusIndex index = load_index(args.index);
  if (index.fold_case() != config.policy.fold_case)
    throw ConfigError(std::string("index was built with --fold-case ") +
                      (index.fold_case() ? "on" : "off") + " but profiling uses --fold-case " + cfg.fold);

  // With a manifest the same text id appears once per group.
  std::map<std::pair<std::string, std::string>, bool> seen;
  std::vector<ProfileRow> rows;
  bool untagged_warned = false;
  for (const auto& e : entries) {
    if (!seen.emplace(std::pair{e.group, e.text_id}, true).second)
      throw ConfigError("duplicate text id '" + e.text_id + "'" +
                        (e.group.empty() ? "" : " in group '" + e.group + "'"));
    const auto tokens = detail::read_tokens(e.path, cfg.tagged);
    ProfileRow row{profile_text(e.text_id, tokens, index, config), e.group};
    if (cfg.tagged == "plain" && !untagged_warned) {
      err << "warning: untagged input; proper-name exclusion is unavailable, numbers are excluded "
             "by the digit rule\n";
      untagged_warned = true;
    }
    if (row.profile.empty())
      err << "warning: text '" << e.text_id << "' has no bigrams in the denominator; "
          << "percentages left empty and excluded from statistics\n";
    rows.push_back(std::move(row));
  }

  detail::emit(args.output, out, [&](std::ostream& o) {
    if (cfg.format == "json")
      write_profiles_json(o, rows, grouped);
    else if (cfg.format == "markdown")
      write_profiles_markdown(o, rows, cfg.decimals, grouped);
    else
      write_profiles_csv(o, rows, cfg.decimals, grouped);
  });
  return kSuccess;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::vector<std::string> group_files;  // NAME=FILE
  std::vector<std::string> combined;     // profile files carrying a group column
  std::vector<std::string> order;
  std::string out_dir;
};

inline std::vector<Group> collect_groups(const CompareArgs& args) {
  std::vector<Group> groups;
  auto group_named = [&](const std::string& name) -> Group& {
    for (auto& g : groups)
      if (g.name == name) return g;
    groups.push_back({name, {}});
    return groups.back();
  };
  for (const auto& item : args.group_files) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw UsageError("--group expects NAME=FILE, got '" + item + "'");
    auto& g = group_named(item.substr(0, eq));
    for (auto& row : read_profiles(item.substr(eq + 1))) g.profiles.push_back(std::move(row.profile));
  }
  for (const auto& path : args.combined) {
    for (auto& row : read_profiles(path)) {
      if (row.group.empty())
        throw UsageError("'" + path + "' has no group column; use --group NAME=FILE");
      group_named(row.group).profiles.push_back(std::move(row.profile));
    }
  }
  if (!args.order.empty()) {
    std::vector<Group> ordered;
    for (const auto& name : args.order) {
      const auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.name == name; });
      if (it == groups.end()) throw UsageError("--order names unknown group '" + name + "'");
      ordered.push_back(std::move(*it));
      groups.erase(it);
    }
    if (!groups.empty()) throw UsageError("--order does not list group '" + groups.front().name + "'");
    groups = std::move(ordered);
  }
  if (groups.size() < 2) throw UsageError("compare needs at least 2 groups");
  return groups;
}

inline int cmd_compare(const CompareArgs& args, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<Group> groups = collect_groups(args);
  std::vector<ComparisonTable> tables;
  for (const Measure m : kMeasures) tables.push_back(compare_all(groups, m));

  bool any_ok = false;
  for (const auto& table : tables) {
    for (const auto& c : table.cells) {
      if (c.status == CellStatus::ok) {
        any_ok = true;
        continue;
      }
      err << "warning: " << to_string(c.measure) << ' ' << c.row << " - " << c.col << ": "
          << to_string(c.status) << " (" << c.message << ")\n";
    }
  }
  for (const auto& g : groups)
    for (const auto& p : g.profiles)
      if (p.empty()) err << "note: text '" << p.text_id << "' in " << g.name << " has no percentages\n";

  auto write_json = [&](std::ostream& o) {
    nlohmann::ordered_json j;
    j["group_means"] = group_means_json(tables);
    j["comparison"] = comparison_json(tables);
    o << j.dump(2) << '\n';
  };

  if (!args.out_dir.empty()) {
    const std::filesystem::path dir(args.out_dir);
    std::filesystem::create_directories(dir);
    auto file = [&](const char* name) { return (dir / name).string(); };
    detail::emit(file("group_means.csv"), out, [&](std::ostream& o) { write_group_means_csv(o, tables, cfg.decimals); });
    detail::emit(file("comparison.csv"), out, [&](std::ostream& o) { write_comparison_csv(o, tables, cfg.decimals); });
    detail::emit(file("comparison.json"), out, [&](std::ostream& o) { o << comparison_json(tables).dump(2) << '\n'; });
    detail::emit(file("plot_data.csv"), out, [&](std::ostream& o) { write_plot_data_csv(o, tables, cfg.decimals); });
    detail::emit(file("report.md"), out, [&](std::ostream& o) { write_report_markdown(o, tables, cfg.decimals); });
  }

  if (cfg.format == "json") {
    write_json(out);
  } else if (cfg.format == "markdown") {
    write_report_markdown(out, tables, cfg.decimals);
  } else {
    write_group_means_csv(out, tables, cfg.decimals);
    out << '\n';
    write_comparison_csv(out, tables, cfg.decimals);
  }
  return any_ok ? kSuccess : kDegenerate;
}

// ---------------------------------------------------------------------------

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Formulaic-language profiling with MI and t-score against a reference corpus", "collgram"};
  app.require_subcommand(1);

  RunConfig cfg;
  IndexBuildArgs build_args;
  std::string info_path;
  ProfileArgs profile_args;
  CompareArgs compare_args;

  auto* index_cmd = app.add_subcommand("index", "Build or inspect a reference-corpus index");
  index_cmd->require_subcommand(1);

  auto* build = index_cmd->add_subcommand("build", "Count unigrams and bigrams of a reference corpus");
  build->add_option("corpus", build_args.inputs, "Corpus files");
  build->add_option("-o,--output", build_args.output, "Index file to write")->envname("COLLGRAM_INDEX");
  build->add_option("--source", build_args.source, "Free-text source description");
  build->add_option("--min-count", cfg.min_count, "Minimum count for a bigram to be stored")
      ->capture_default_str();
  build->add_flag("--stamp", build_args.stamp, "Record the build time in the index");
  detail::add_input_options(*build, cfg);

  auto* info = index_cmd->add_subcommand("info", "Print index totals and metadata");
  info->add_option("index", info_path, "Index file")->envname("COLLGRAM_INDEX");
  detail::add_output_options(*info, cfg);

  auto* profile = app.add_subcommand("profile", "Per-text percentages of highly collocational bigrams");
  profile->add_option("texts", profile_args.texts, "Text files (id = file stem)");
  profile->add_option("--index", profile_args.index, "Index file")->envname("COLLGRAM_INDEX");
  profile->add_option("--manifest", profile_args.manifest, "text_id<TAB>group<TAB>path manifest");
  profile->add_option("-o,--output", profile_args.output, "Write profiles here instead of stdout");
  detail::add_scoring_options(*profile, cfg);
  detail::add_input_options(*profile, cfg);
  detail::add_output_options(*profile, cfg);

  auto* compare = app.add_subcommand("compare", "Paired comparisons between groups of profiles");
  compare->add_option("profiles", compare_args.combined, "Profile files with a group column");
  compare->add_option("--group", compare_args.group_files, "NAME=FILE, repeatable, in table order")
      ->allow_extra_args(false);
  compare->add_option("--order", compare_args.order, "Group order")->delimiter(',')->allow_extra_args(false);
  compare->add_option("--out-dir", compare_args.out_dir, "Also write every table to this directory");
  detail::add_output_options(*compare, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (build->parsed()) return cmd_index_build(build_args, cfg, out);
    if (info->parsed()) return cmd_index_info(info_path, cfg, out);
    if (profile->parsed()) return cmd_profile(profile_args, cfg, out, err);
    if (compare->parsed()) return cmd_compare(compare_args, cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace collgram::cli

#endif  // COLLGRAM_CLI_HPP
