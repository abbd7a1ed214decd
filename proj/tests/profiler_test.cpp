#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "collgram/profiler.hpp"
#include "oracle.hpp"

using namespace collgram;

namespace {

Token tagged(const std::string& surface, const std::string& tag) {
  const std::vector<std::string> line{surface + "\t" + tag};
  return parse_tagged(line, TaggedFormat::vertical).front();
}

std::vector<Bigram> pairs(std::initializer_list<std::pair<const char*, const char*>> items) {
  std::vector<Bigram> out;
  for (const auto& [a, b] : items) out.emplace_back(a, b);
  return out;
}

// Naive profile: enumerate pairs by hand from word runs and score each one
// from the raw counts.
struct OracleProfile {
  std::size_t n_bigrams = 0, n_attested = 0, n_high_mi = 0, n_high_t = 0;
};

OracleProfile oracle_profile(const oracle::Counts& ref, const oracle::Segments& text, Thresholds th) {
  OracleProfile p;
  for (const auto& run : text) {
    for (std::size_t i = 0; i + 1 < run.size(); ++i) {
      ++p.n_bigrams;
      const auto s = oracle::score(ref, run[i], run[i + 1]);
      if (!s.attested) continue;
      ++p.n_attested;
      p.n_high_mi += s.mi >= th.mi_min;
      p.n_high_t += s.t >= th.t_min;
    }
  }
  return p;
}

}  // namespace

TEST(ExtractBigrams, PunctuationInterrupts) {
  EXPECT_EQ(extract_bigrams(tokenize_plain("the cat, sat")), pairs({{"the", "cat"}}));
}

TEST(ExtractBigrams, NonWordAndSentenceBreakInterrupt) {
  EXPECT_EQ(extract_bigrams(tokenize_plain("at 8 hours a day")), pairs({{"hours", "a"}, {"a", "day"}}));
  EXPECT_EQ(extract_bigrams(tokenize_plain("one two\n\nthree four")),
            pairs({{"one", "two"}, {"three", "four"}}));
}

TEST(ExtractBigrams, ProperNameExcluded) {
  const std::vector<Token> tokens{tagged("visited", "VVD"), tagged("London", "NP1"), tagged("today", "RT")};
  EXPECT_TRUE(extract_bigrams(tokens).empty());
  const auto details = extract_with_details(tokens, {});
  EXPECT_EQ(details.excluded, 2u);
  EXPECT_TRUE(details.tagged);
}

TEST(ExtractBigrams, NumberExcludedByTag) {
  const std::vector<std::string> lines{"at_II eight_MC hours_NNT2 a_AT1 day_NNT1 ._."};
  const auto tokens = parse_tagged(lines, TaggedFormat::underscore);
  EXPECT_EQ(extract_bigrams(tokens), pairs({{"hours", "a"}, {"a", "day"}}));
}

TEST(ExtractBigrams, DropTokenModeSameBigrams) {
  const std::vector<Token> tokens{tagged("we", "PPIS2"), tagged("visited", "VVD"), tagged("London", "NP1"),
                                  tagged("today", "RT"), tagged("again", "RT")};
  ExtractionPolicy by_token;
  by_token.exclusion_mode = ExclusionMode::drop_token;
  const auto a = extract_with_details(tokens, {});
  const auto b = extract_with_details(tokens, by_token);
  EXPECT_EQ(a.bigrams, pairs({{"we", "visited"}, {"today", "again"}}));
  EXPECT_EQ(a.bigrams, b.bigrams);
  EXPECT_EQ(a.excluded, 2u);
  EXPECT_EQ(b.excluded, 1u);
}

TEST(ExtractBigrams, EmptyAndFolding) {
  EXPECT_TRUE(extract_bigrams({}).empty());
  ExtractionPolicy raw;
  raw.fold_case = false;
  EXPECT_EQ(extract_bigrams(tokenize_plain("The Cat"), raw), pairs({{"The", "Cat"}}));
  EXPECT_EQ(extract_bigrams(tokenize_plain("The Cat")), pairs({{"the", "cat"}}));
}

TEST(ProfileText, ToyIndexAgainstOracle) {
  const std::string corpus = "the cat sat on the mat the cat sat";
  const auto index = build_index(tokenize_plain(corpus));
  ProfileConfig cfg;
  cfg.thresholds = {0.5, 0.5};
  const auto p = profile_text("t1", tokenize_plain("the cat ran"), index, cfg);
  EXPECT_EQ(p.n_bigrams, 2u);
  EXPECT_EQ(p.n_attested, 1u);

  const auto ref = oracle::recount({{"the", "cat", "sat", "on", "the", "mat", "the", "cat", "sat"}});
  const auto want = oracle_profile(ref, {{"the", "cat", "ran"}}, cfg.thresholds);
  EXPECT_EQ(p.n_high_mi, want.n_high_mi);
  EXPECT_EQ(p.n_high_t, want.n_high_t);
  EXPECT_DOUBLE_EQ(*p.pct_high_mi, 100.0 * static_cast<double>(want.n_high_mi) / 2.0);
  EXPECT_DOUBLE_EQ(*p.pct_high_t, 100.0 * static_cast<double>(want.n_high_t) / 2.0);
}

TEST(ProfileText, NothingAttested) {
  const auto index = build_index(tokenize_plain("a b a b"));
  const auto p = profile_text("x", tokenize_plain("xyzzy plugh"), index);
  EXPECT_EQ(p.n_bigrams, 1u);
  EXPECT_EQ(p.n_attested, 0u);
  ASSERT_TRUE(p.pct_high_mi);
  EXPECT_EQ(*p.pct_high_mi, 0.0);
  EXPECT_EQ(*p.pct_high_t, 0.0);

  ProfileConfig attested;
  attested.denominator = DenominatorMode::attested;
  EXPECT_TRUE(profile_text("x", tokenize_plain("xyzzy plugh"), index, attested).empty());
}

TEST(ProfileText, SingleWordHasNoPercentages) {
  const auto index = build_index(tokenize_plain("a b a b"));
  const auto p = profile_text("one", tokenize_plain("word"), index);
  EXPECT_EQ(p.n_bigrams, 0u);
  EXPECT_TRUE(p.empty());
  EXPECT_FALSE(p.pct_high_t);
}

TEST(ProfileText, FoldMismatchIsConfigError) {
  const auto index = build_index(tokenize_plain("a b"), {.fold_case = false});
  EXPECT_THROW(profile_text("t", tokenize_plain("a b"), index), ConfigError);
}

TEST(ProfileText, AttestedDenominator) {
  const auto index = build_index(tokenize_plain("a b a b"));
  ProfileConfig cfg;
  cfg.thresholds = {0.5, 0.5};
  cfg.denominator = DenominatorMode::attested;
  const auto p = profile_text("t", tokenize_plain("a b zz"), index, cfg);
  EXPECT_EQ(p.n_bigrams, 2u);
  EXPECT_EQ(p.n_attested, 1u);
  EXPECT_EQ(p.n_high_mi, 1u);  // MI(a,b) = 1
  EXPECT_DOUBLE_EQ(*p.pct_high_mi, 100.0);
  EXPECT_EQ(p.n_high_t, 1u);  // t(a,b) = 0.707
}

TEST(ProfileProperties, OracleEquivalenceAndBounds) {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ref_segments = oracle::random_segments(rng, 100);
    const auto index = build_index(oracle::to_tokens(ref_segments, rng));
    const auto ref = oracle::recount(ref_segments);
    const auto text = oracle::random_segments(rng, 50, 8);  // g, h are out of vocabulary
    ProfileConfig cfg;
    std::uniform_real_distribution<double> th(-1.0, 3.0);
    cfg.thresholds = {th(rng), th(rng)};
    const auto p = profile_text("t", oracle::to_tokens(text, rng), index, cfg);
    const auto want = oracle_profile(ref, text, cfg.thresholds);
    EXPECT_EQ(p.n_bigrams, want.n_bigrams);
    EXPECT_EQ(p.n_attested, want.n_attested);
    EXPECT_EQ(p.n_high_mi, want.n_high_mi);
    EXPECT_EQ(p.n_high_t, want.n_high_t);

    EXPECT_LE(p.n_high_mi, p.n_attested);
    EXPECT_LE(p.n_high_t, p.n_attested);
    EXPECT_LE(p.n_attested, p.n_bigrams);
    EXPECT_EQ(p.pct_high_mi.has_value(), p.n_bigrams > 0);
    if (p.pct_high_mi) {
      EXPECT_GE(*p.pct_high_mi, 0.0);
      EXPECT_LE(*p.pct_high_mi, 100.0);
      EXPECT_GE(*p.pct_high_t, 0.0);
      EXPECT_LE(*p.pct_high_t, 100.0);
    }
  }
}

TEST(ProfileProperties, SplitAtPunctuationIsAdditive) {
  std::mt19937 rng(4);
  const auto index = build_index(oracle::to_tokens(oracle::random_segments(rng, 100), rng));
  for (int trial = 0; trial < 100; ++trial) {
    auto tokens = oracle::to_tokens(oracle::random_segments(rng, 50), rng);
    std::uniform_int_distribution<std::size_t> at(0, tokens.size());
    const std::size_t cut = at(rng);
    Token comma;
    comma.surface = comma.folded = ",";
    comma.kind = TokenKind::punctuation;
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(cut), comma);
    const auto whole = profile_text("w", tokens, index, {.thresholds = {0.5, 0.5}});
    const auto left = profile_text("l", std::span(tokens).first(cut), index, {.thresholds = {0.5, 0.5}});
    const auto right = profile_text("r", std::span(tokens).subspan(cut + 1), index, {.thresholds = {0.5, 0.5}});
    EXPECT_EQ(whole.n_bigrams, left.n_bigrams + right.n_bigrams);
    EXPECT_EQ(whole.n_attested, left.n_attested + right.n_attested);
    EXPECT_EQ(whole.n_high_mi, left.n_high_mi + right.n_high_mi);
    EXPECT_EQ(whole.n_high_t, left.n_high_t + right.n_high_t);
  }
}

TEST(ProfileCollection, OrderAndDuplicates) {
  const auto index = build_index(tokenize_plain("a b a b"));
  const std::vector<TextInput> two{{"second", tokenize_plain("a b")}, {"first", tokenize_plain("b a")}};
  const auto profiles = profile_collection(two, index);
  ASSERT_EQ(profiles.size(), 2u);
  EXPECT_EQ(profiles[0].text_id, "second");
  EXPECT_EQ(profiles[1].text_id, "first");

  const std::vector<TextInput> dup{{"x", {}}, {"x", {}}};
  try {
    profile_collection(dup, index);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(ProfileCollection, BatchEqualsElementwise) {
  std::mt19937 rng(279);
  const auto index = build_index(oracle::to_tokens(oracle::random_segments(rng, 100), rng));
  std::vector<TextInput> texts;
  for (int i = 0; i < 279; ++i)
    texts.push_back({"text" + std::to_string(i), oracle::to_tokens(oracle::random_segments(rng, 50), rng)});
  const ProfileConfig cfg{.thresholds = {0.5, 1.0}};
  const auto batch = profile_collection(texts, index, cfg);
  ASSERT_EQ(batch.size(), 279u);
  for (std::size_t i = 0; i < texts.size(); ++i)
    EXPECT_EQ(batch[i], profile_text(texts[i].text_id, texts[i].tokens, index, cfg));
  EXPECT_EQ(batch, profile_collection(texts, index, cfg));  // deterministic
}
