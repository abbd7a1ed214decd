#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "collgram/report.hpp"

using namespace collgram;

namespace {

TextProfile prof(const std::string& id, std::optional<double> mi, std::optional<double> t) {
  TextProfile p;
  p.text_id = id;
  p.n_bigrams = 10;
  p.n_attested = 8;
  p.n_high_mi = 1;
  p.n_high_t = 6;
  p.pct_high_mi = mi;
  p.pct_high_t = t;
  return p;
}

std::vector<ComparisonTable> four_group_tables() {
  std::vector<Group> groups;
  std::mt19937 rng(1);
  std::normal_distribution<double> noise(0.0, 1.0);
  const char* names[] = {"Human", "DeepL", "Google", "Microsoft"};
  for (int g = 0; g < 4; ++g) {
    Group group{names[g], {}};
    for (int i = 0; i < 40; ++i)
      group.profiles.push_back(prof(std::to_string(i), 11 - 0.4 * g + noise(rng), 58 + g + noise(rng)));
    groups.push_back(std::move(group));
  }
  return {compare_all(groups, Measure::high_mi), compare_all(groups, Measure::high_t)};
}

}  // namespace

TEST(Format, FixedAndNegativeZero) {
  EXPECT_EQ(format_fixed(11.214, 2), "11.21");
  EXPECT_EQ(format_fixed(-0.001, 2), "0.00");
  EXPECT_EQ(format_fixed(-0.72, 2), "-0.72");
  EXPECT_EQ(format_fixed(std::optional<double>{}, 2), "");
  EXPECT_EQ(format_fixed(2.5, 0), "2");
}

TEST(Csv, QuoteAndSplit) {
  EXPECT_EQ(csv::quote("plain"), "plain");
  EXPECT_EQ(csv::quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv::split("x,\"a,b\",,\"q\"\"\"\r"), (std::vector<std::string>{"x", "a,b", "", "q\""}));
}

TEST(ProfilesCsv, HeaderAndEmptyFields) {
  std::ostringstream out;
  const std::vector<ProfileRow> rows{{prof("t1", 12.3456, 50.0), ""}, {prof("t,2", std::nullopt, std::nullopt), ""}};
  write_profiles_csv(out, rows, 2, false);
  EXPECT_EQ(out.str(),
            "text_id,n_bigrams,n_attested,n_high_mi,n_high_t,pct_high_mi,pct_high_t\n"
            "t1,10,8,1,6,12.35,50.00\n"
            "\"t,2\",10,8,1,6,,\n");
}

TEST(ProfilesCsv, ReadBackPreservesRows) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pct(0.0, 100.0);
  std::vector<ProfileRow> rows;
  for (int i = 0; i < 50; ++i) {
    auto p = prof("id" + std::to_string(i), pct(rng), pct(rng));
    if (i % 7 == 0) p.pct_high_mi = p.pct_high_t = std::nullopt;
    rows.push_back({p, i % 2 ? "A" : "B"});
  }
  for (const bool json : {false, true}) {
    std::stringstream buf;
    if (json) write_profiles_json(buf, rows, true);
    else write_profiles_csv(buf, rows, 6, true);
    const auto back = json ? read_profiles_json(buf) : read_profiles_csv(buf);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(back[i].group, rows[i].group);
      EXPECT_EQ(back[i].profile.text_id, rows[i].profile.text_id);
      EXPECT_EQ(back[i].profile.n_high_t, rows[i].profile.n_high_t);
      ASSERT_EQ(back[i].profile.pct_high_mi.has_value(), rows[i].profile.pct_high_mi.has_value());
      if (rows[i].profile.pct_high_mi) {
        const double tol = json ? 0.0 : 5e-7;
        EXPECT_NEAR(*back[i].profile.pct_high_mi, *rows[i].profile.pct_high_mi, tol);
      }
    }
  }
}

TEST(ProfilesCsv, BadInput) {
  std::istringstream missing("text_id,n_bigrams\nx,1\n");
  EXPECT_THROW(read_profiles_csv(missing), ParseError);
  std::istringstream ragged("text_id,pct_high_mi,pct_high_t\nx,1\n");
  EXPECT_THROW(read_profiles_csv(ragged), ParseError);
  std::istringstream bad_number("text_id,pct_high_mi,pct_high_t\nx,1.5,abc\n");
  EXPECT_THROW(read_profiles_csv(bad_number), ParseError);
}

TEST(Manifest, ParsesAndResolves) {
  std::istringstream in("# id group path\nt1\tHuman\th/t1.txt\n\nt1\tDeepL\t/abs/t1.txt\r\n");
  const auto entries = read_manifest(in, "/data");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].text_id, "t1");
  EXPECT_EQ(entries[0].group, "Human");
  EXPECT_EQ(entries[0].path, std::filesystem::path("/data/h/t1.txt"));
  EXPECT_EQ(entries[1].path, std::filesystem::path("/abs/t1.txt"));
  std::istringstream bad("t1 Human path\n");
  EXPECT_THROW(read_manifest(bad), ParseError);
}

TEST(GroupMeansMarkdown, OneRowPerMeasureOneColumnPerGroup) {
  const auto tables = four_group_tables();
  std::ostringstream out;
  write_group_means_markdown(out, tables, 2);
  std::istringstream lines(out.str());
  std::vector<std::string> rows;
  for (std::string l; std::getline(lines, l);) rows.push_back(l);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "| Measure | Human | DeepL | Google | Microsoft |");
  EXPECT_TRUE(rows[2].starts_with("| High MI | "));
  EXPECT_TRUE(rows[3].starts_with("| High t-score | "));
  EXPECT_EQ(std::count(rows[2].begin(), rows[2].end(), '|'), 6);
  EXPECT_NE(rows[2].find(format_fixed(*tables[0].means[0].mean, 2)), std::string::npos);
}

TEST(ComparisonMarkdown, TriangularLayout) {
  const auto tables = four_group_tables();
  std::ostringstream out;
  write_comparison_markdown(out, tables, 2);
  const std::string text = out.str();
  EXPECT_NE(text.find("| | Human D | Es | % | DeepL D | Es | % | Google D | Es | % |"), std::string::npos);
  EXPECT_NE(text.find("| **High MI** |"), std::string::npos);
  EXPECT_NE(text.find("| **High t-score** |"), std::string::npos);
  // DeepL row has one populated cell followed by two empty ones.
  const auto deepl = text.find("| DeepL | ");
  ASSERT_NE(deepl, std::string::npos);
  const auto line = text.substr(deepl, text.find('\n', deepl) - deepl);
  EXPECT_TRUE(line.ends_with(" | | | | | |")) << line;
  EXPECT_NE(text.find("p < 0.0001"), std::string::npos);
}

TEST(ComparisonJson, PerMeasureArrays) {
  const auto tables = four_group_tables();
  const auto j = comparison_json(tables);
  ASSERT_TRUE(j.contains("high_mi"));
  ASSERT_TRUE(j.contains("high_t"));
  EXPECT_EQ(j["high_mi"].size(), 6u);
  const auto& cell = j["high_mi"][0];
  for (const char* key : {"row", "col", "mean_diff", "t_stat", "df", "p_value", "cohen_d_z", "cohen_d_av",
                          "pct_same_sign", "n"})
    EXPECT_TRUE(cell.contains(key)) << key;
  EXPECT_EQ(cell["row"], "DeepL");
  EXPECT_EQ(cell["col"], "Human");
}

TEST(ComparisonCsv, HeaderAndRowCount) {
  const auto tables = four_group_tables();
  std::ostringstream out;
  write_comparison_csv(out, tables, 2);
  const std::string text = out.str();
  EXPECT_TRUE(text.starts_with(
      "measure,row,col,mean_diff,t_stat,df,p_value,cohen_d_z,cohen_d_av,pct_same_sign,n,status\n"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 13);

  std::ostringstream means;
  write_group_means_csv(means, tables, 2);
  EXPECT_TRUE(means.str().starts_with("group,measure,mean,sd,n\nHuman,high_mi,"));
  std::ostringstream plot;
  write_plot_data_csv(plot, tables, 2);
  EXPECT_TRUE(plot.str().starts_with("measure,group,mean,se,n\nhigh_mi,Human,"));
}
