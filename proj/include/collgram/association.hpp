#ifndef COLLGRAM_ASSOCIATION_HPP
#define COLLGRAM_ASSOCIATION_HPP

#include <cmath>
#include <optional>
#include <string_view>

#include "collgram/corpus_index.hpp"
#include "collgram/error.hpp"

namespace collgram {

/// Which corpus total serves as N in the expected frequency.
enum class NBasis { tokens, bigrams };

struct AssociationScores {
  bool attested = false;
  Count observed = 0;
  double expected = 0.0;
  std::optional<double> mi;  // bits
  std::optional<double> t;

  bool defined() const { return mi.has_value(); }
};

struct Thresholds {
  double mi_min = 5.0;
  double t_min = 6.0;
};

struct Classification {
  bool high_mi = false;
  bool high_t = false;
  bool attested = false;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// E = f1 * f2 / N.
inline double expected_frequency(Count f1, Count f2, Count total) {
  if (total == 0) throw UndefinedBasisError("expected frequency with N = 0");
  return static_cast<double>(f1) * static_cast<double>(f2) / static_cast<double>(total);
}

/// MI = log2(O / E).
inline double mutual_information(Count observed, double expected) {
  if (observed == 0 || !(expected > 0.0))
    throw UndefinedScoreError("mutual information needs O > 0 and E > 0");
  return std::log2(static_cast<double>(observed) / expected);
}

/// t = (O - E) / sqrt(O).
inline double t_score(Count observed, double expected) {
  if (observed == 0) throw UndefinedScoreError("t-score needs O > 0");
  const auto o = static_cast<double>(observed);
  return (o - expected) / std::sqrt(o);
}

inline Count basis_total(const CorpusIndex& index, NBasis basis) {
  return basis == NBasis::tokens ? index.total_tokens() : index.total_bigrams();
}

/// Scores (w1, w2) against the index. Unattested or out-of-vocabulary pairs
/// come back with attested = false and no scores.
inline AssociationScores score_bigram(const CorpusIndex& index, std::string_view w1,
                                      std::string_view w2, NBasis basis = NBasis::tokens) {
  const LookupResult hit = index.lookup(w1, w2);
  AssociationScores s;
  s.attested = hit.attested;
  s.observed = hit.observed;
  if (!hit.attested || hit.f1 == 0 || hit.f2 == 0) return s;
  s.expected = expected_frequency(hit.f1, hit.f2, basis_total(index, basis));
  s.mi = mutual_information(hit.observed, s.expected);
  s.t = t_score(hit.observed, s.expected);
  return s;
}

/// Inclusive thresholds: a bigram is highly collocational at mi >= mi_min.
inline Classification classify(const AssociationScores& scores, const Thresholds& th = {}) {
  Classification c;
  c.attested = scores.attested;
  if (scores.attested && scores.defined()) {
    c.high_mi = *scores.mi >= th.mi_min;
    c.high_t = *scores.t >= th.t_min;
  }
  return c;
}

}  // namespace collgram

#endif  // COLLGRAM_ASSOCIATION_HPP
