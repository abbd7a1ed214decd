#ifndef COLLGRAM_PROFILER_HPP
#define COLLGRAM_PROFILER_HPP

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "collgram/association.hpp"
#include "collgram/corpus_index.hpp"
#include "collgram/error.hpp"
#include "collgram/token.hpp"

namespace collgram {

enum class ExclusionMode { drop_bigram, drop_token };
enum class DenominatorMode { all, attested };

struct ExtractionPolicy {
  std::vector<std::string> exclude_tag_prefixes{"NP", "MC"};
  ExclusionMode exclusion_mode = ExclusionMode::drop_bigram;
  bool fold_case = true;

  bool excludes(const Token& token) const {
    if (!token.tag) return false;
    return std::any_of(exclude_tag_prefixes.begin(), exclude_tag_prefixes.end(),
                       [&](const std::string& p) { return token.tag->starts_with(p); });
  }
};

using Bigram = std::pair<std::string, std::string>;

struct Extraction {
  std::vector<Bigram> bigrams;
  // Bigrams removed (drop_bigram) or tokens removed (drop_token) by the
  // tag exclusion. The retained bigrams are the same in both modes.
  std::size_t excluded = 0;
  bool tagged = false;  // at least one word token carried a tag
};

/// Adjacent word-word pairs. Any punctuation, non-word or sentence-break
/// token interrupts adjacency. An excluded (proper name / number) word does
/// not interrupt, but no retained pair may contain it.
inline Extraction extract_with_details(std::span<const Token> tokens, const ExtractionPolicy& policy) {
  Extraction out;
  const Token* previous = nullptr;
  for (const Token& token : tokens) {
    if (!token.is_word()) {
      previous = nullptr;
      continue;
    }
    out.tagged = out.tagged || token.tag.has_value();
    const bool excluded = policy.excludes(token);
    if (excluded && policy.exclusion_mode == ExclusionMode::drop_token) ++out.excluded;
    if (previous) {
      if (excluded || policy.excludes(*previous)) {
        if (policy.exclusion_mode == ExclusionMode::drop_bigram) ++out.excluded;
      } else {
        out.bigrams.emplace_back(previous->form(policy.fold_case), token.form(policy.fold_case));
      }
    }
    previous = &token;
  }
  return out;
}

inline std::vector<Bigram> extract_bigrams(std::span<const Token> tokens,
                                           const ExtractionPolicy& policy = {}) {
  return extract_with_details(tokens, policy).bigrams;
}

struct ProfileConfig {
  Thresholds thresholds;
  ExtractionPolicy policy;
  DenominatorMode denominator = DenominatorMode::all;
  NBasis n_basis = NBasis::tokens;
};

struct TextProfile {
  std::string text_id;
  std::size_t n_bigrams = 0;
  std::size_t n_attested = 0;
  std::size_t n_high_mi = 0;
  std::size_t n_high_t = 0;
  std::optional<double> pct_high_mi;
  std::optional<double> pct_high_t;
  DenominatorMode denominator_mode = DenominatorMode::all;
  std::size_t n_excluded = 0;
  bool tagged = false;

  /// No bigram in the chosen denominator: percentages are absent.
  bool empty() const { return !pct_high_mi.has_value(); }

  friend bool operator==(const TextProfile&, const TextProfile&) = default;
};

inline TextProfile profile_text(std::string text_id, std::span<const Token> tokens,
                                const CorpusIndex& index, const ProfileConfig& config = {}) {
  if (index.fold_case() != config.policy.fold_case)
    throw ConfigError(std::string("case folding mismatch: index built with fold=") +
                      (index.fold_case() ? "on" : "off") + ", profiling with fold=" +
                      (config.policy.fold_case ? "on" : "off"));

  const Extraction extraction = extract_with_details(tokens, config.policy);
  TextProfile p;
  p.text_id = std::move(text_id);
  p.denominator_mode = config.denominator;
  p.n_excluded = extraction.excluded;
  p.tagged = extraction.tagged;
  p.n_bigrams = extraction.bigrams.size();
  for (const auto& [w1, w2] : extraction.bigrams) {
    const Classification c = classify(score_bigram(index, w1, w2, config.n_basis), config.thresholds);
    p.n_attested += c.attested;
    p.n_high_mi += c.high_mi;
    p.n_high_t += c.high_t;
  }
  const std::size_t denominator =
      config.denominator == DenominatorMode::all ? p.n_bigrams : p.n_attested;
  if (denominator > 0) {
    p.pct_high_mi = 100.0 * static_cast<double>(p.n_high_mi) / static_cast<double>(denominator);
    p.pct_high_t = 100.0 * static_cast<double>(p.n_high_t) / static_cast<double>(denominator);
  }
  return p;
}

struct TextInput {
  std::string text_id;
  std::vector<Token> tokens;
};

/// Profiles every text in input order. Ids must be unique.
inline std::vector<TextProfile> profile_collection(std::span<const TextInput> texts,
                                                   const CorpusIndex& index,
                                                   const ProfileConfig& config = {}) {
  std::unordered_set<std::string_view> seen;
  for (const auto& text : texts)
    if (!seen.insert(text.text_id).second)
      throw ConfigError("duplicate text id '" + text.text_id + "'");

  std::vector<TextProfile> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(profile_text(text.text_id, text.tokens, index, config));
  return out;
}

}  // namespace collgram

#endif  // COLLGRAM_PROFILER_HPP
