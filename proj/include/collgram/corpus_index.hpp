#ifndef COLLGRAM_CORPUS_INDEX_HPP
#define COLLGRAM_CORPUS_INDEX_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/crc.hpp>

#include "collgram/error.hpp"
#include "collgram/token.hpp"

namespace collgram {

using Count = std::uint64_t;

inline constexpr std::string_view kIndexMagic = "COLLGRAM-INDEX";
inline constexpr int kIndexVersion = 1;

struct IndexMetadata {
  std::string source;
  bool fold_case = true;
  std::optional<std::string> built;  // build timestamp, only when stamped
  int format_version = kIndexVersion;

  friend bool operator==(const IndexMetadata&, const IndexMetadata&) = default;
};

struct BuildConfig {
  bool fold_case = true;
  Count min_count = 1;  // bigrams seen fewer times are left out of the index
  std::string source;
  std::optional<std::string> built;
};

struct LookupResult {
  bool attested = false;
  Count observed = 0;
  Count f1 = 0;
  Count f2 = 0;
  Count total_tokens = 0;

  friend bool operator==(const LookupResult&, const LookupResult&) = default;
};

namespace detail {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

using WordIds = std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>>;

inline std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}
inline std::uint32_t first_of(std::uint64_t key) { return static_cast<std::uint32_t>(key >> 32); }
inline std::uint32_t second_of(std::uint64_t key) { return static_cast<std::uint32_t>(key); }

inline std::string single_line(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
  return s;
}

}  // namespace detail

/// Immutable unigram/bigram frequency store over a reference corpus.
///
/// Word ids follow byte-wise lexicographic order of the words, so iterating
/// bigram keys in id order is the sorted order used by the file format.
/// All const member functions are safe to call concurrently.
class CorpusIndex {
 public:
  CorpusIndex() = default;

  Count total_tokens() const { return total_tokens_; }
  Count total_bigrams() const { return total_bigrams_; }
  std::size_t vocabulary_size() const { return words_.size(); }
  std::size_t bigram_types() const { return bigrams_.size(); }
  const IndexMetadata& metadata() const { return metadata_; }
  bool fold_case() const { return metadata_.fold_case; }

  Count unigram(std::string_view word) const {
    const auto id = find(word);
    return id ? unigram_counts_[*id] : 0;
  }

  Count bigram(std::string_view w1, std::string_view w2) const {
    return lookup(w1, w2).observed;
  }

  /// Exact lookup; no case folding is applied to the arguments.
  LookupResult lookup(std::string_view w1, std::string_view w2) const {
    LookupResult r;
    r.total_tokens = total_tokens_;
    const auto id1 = find(w1);
    const auto id2 = find(w2);
    if (id1) r.f1 = unigram_counts_[*id1];
    if (id2) r.f2 = unigram_counts_[*id2];
    if (id1 && id2) {
      if (const auto it = bigrams_.find(detail::pack(*id1, *id2)); it != bigrams_.end()) {
        r.attested = true;
        r.observed = it->second;
      }
    }
    return r;
  }

  /// Visits (word, count) in sorted order.
  template <typename F>
  void for_each_unigram(F&& visit) const {
    for (std::size_t i = 0; i < words_.size(); ++i) visit(words_[i], unigram_counts_[i]);
  }

  /// Visits (w1, w2, count) in sorted order.
  template <typename F>
  void for_each_bigram(F&& visit) const {
    for (const auto key : sorted_bigram_keys())
      visit(words_[detail::first_of(key)], words_[detail::second_of(key)], bigrams_.at(key));
  }

  friend bool operator==(const CorpusIndex& a, const CorpusIndex& b) {
    return a.total_tokens_ == b.total_tokens_ && a.total_bigrams_ == b.total_bigrams_ &&
           a.metadata_ == b.metadata_ && a.words_ == b.words_ &&
           a.unigram_counts_ == b.unigram_counts_ && a.bigrams_ == b.bigrams_;
  }

 private:
  friend class IndexBuilder;
  friend CorpusIndex parse_index(std::string_view bytes);

  std::optional<std::uint32_t> find(std::string_view word) const {
    const auto it = ids_.find(word);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::uint64_t> sorted_bigram_keys() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(bigrams_.size());
    for (const auto& [key, count] : bigrams_) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    return keys;
  }

  Count total_tokens_ = 0;
  Count total_bigrams_ = 0;
  IndexMetadata metadata_;
  std::vector<std::string> words_;
  std::vector<Count> unigram_counts_;
  detail::WordIds ids_;
  std::unordered_map<std::uint64_t, Count> bigrams_;
};

/// Accumulates counts from a token stream. Adjacency is tracked across
/// add() calls, so a corpus can be fed in chunks; interrupt() separates
/// documents. Partial builders over disjoint partitions can be merged in
/// any order.
class IndexBuilder {
 public:
  explicit IndexBuilder(BuildConfig config = {}) : config_(std::move(config)) {}

  const BuildConfig& config() const { return config_; }
  Count tokens_seen() const { return total_tokens_; }

  void add(const Token& token) {
    if (!token.is_word()) {
      previous_.reset();
      return;
    }
    const std::uint32_t id = intern(token.form(config_.fold_case));
    ++counts_[id];
    ++total_tokens_;
    if (previous_) ++bigrams_[detail::pack(*previous_, id)];
    previous_ = id;
  }

  void add(std::span<const Token> tokens) {
    for (const auto& t : tokens) add(t);
  }

  void interrupt() { previous_.reset(); }

  void merge(const IndexBuilder& other) {
    std::vector<std::uint32_t> remap(other.words_.size());
    for (std::size_t i = 0; i < other.words_.size(); ++i) {
      remap[i] = intern(other.words_[i]);
      counts_[remap[i]] += other.counts_[i];
    }
    for (const auto& [key, count] : other.bigrams_)
      bigrams_[detail::pack(remap[detail::first_of(key)], remap[detail::second_of(key)])] += count;
    total_tokens_ += other.total_tokens_;
  }

  /// Freezes the counts. Throws BuildError when no word token was seen.
  CorpusIndex build() const {
    if (total_tokens_ == 0) throw BuildError("empty corpus");

    std::vector<std::uint32_t> order(words_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return words_[a] < words_[b]; });
    std::vector<std::uint32_t> new_id(words_.size());
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) new_id[order[rank]] = rank;

    CorpusIndex index;
    index.total_tokens_ = total_tokens_;
    index.metadata_.source = detail::single_line(config_.source);
    index.metadata_.fold_case = config_.fold_case;
    if (config_.built) index.metadata_.built = detail::single_line(*config_.built);
    index.words_.reserve(words_.size());
    index.unigram_counts_.reserve(words_.size());
    index.ids_.reserve(words_.size());
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
      index.words_.push_back(words_[order[rank]]);
      index.unigram_counts_.push_back(counts_[order[rank]]);
      index.ids_.emplace(words_[order[rank]], rank);
    }
    index.bigrams_.reserve(bigrams_.size());
    for (const auto& [key, count] : bigrams_) {
      if (count < config_.min_count) continue;
      index.bigrams_.emplace(
          detail::pack(new_id[detail::first_of(key)], new_id[detail::second_of(key)]), count);
      index.total_bigrams_ += count;
    }
    return index;
  }

 private:
  std::uint32_t intern(const std::string& word) {
    const auto [it, inserted] = ids_.try_emplace(word, static_cast<std::uint32_t>(words_.size()));
    if (inserted) {
      words_.push_back(word);
      counts_.push_back(0);
    }
    return it->second;
  }

  BuildConfig config_;
  detail::WordIds ids_;
  std::vector<std::string> words_;
  std::vector<Count> counts_;
  std::unordered_map<std::uint64_t, Count> bigrams_;
  std::optional<std::uint32_t> previous_;
  Count total_tokens_ = 0;
};

inline CorpusIndex build_index(std::span<const Token> tokens, BuildConfig config = {}) {
  IndexBuilder builder(std::move(config));
  builder.add(tokens);
  return builder.build();
}

// ---------------------------------------------------------------------------
// Persistence

inline std::uint32_t crc32(std::string_view bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

/// Serializes to the line-oriented v1 format. Output is byte-deterministic.
inline std::string serialize_index(const CorpusIndex& index) {
  std::string out;
  out.reserve(64 + index.vocabulary_size() * 16 + index.bigram_types() * 24);
  out += kIndexMagic;
  out += " v" + std::to_string(kIndexVersion) + "\n";
  out += "tokens=" + std::to_string(index.total_tokens()) +
         " bigrams=" + std::to_string(index.total_bigrams()) +
         " fold=" + (index.fold_case() ? "1" : "0") + "\n";
  out += "source=" + detail::single_line(index.metadata().source) + "\n";
  if (index.metadata().built) out += "built=" + detail::single_line(*index.metadata().built) + "\n";
  out += "#UNIGRAMS\n";
  index.for_each_unigram([&](const std::string& w, Count c) {
    out += w;
    out += '\t';
    out += std::to_string(c);
    out += '\n';
  });
  out += "#BIGRAMS\n";
  index.for_each_bigram([&](const std::string& w1, const std::string& w2, Count c) {
    out += w1;
    out += '\t';
    out += w2;
    out += '\t';
    out += std::to_string(c);
    out += '\n';
  });
  char crc_line[32];
  std::snprintf(crc_line, sizeof crc_line, "#CRC=%08x\n", crc32(out));
  out += crc_line;
  return out;
}

inline void save_index(const CorpusIndex& index, const std::filesystem::path& destination) {
  const std::string bytes = serialize_index(index);
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + destination.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) throw Error("write to '" + destination.string() + "' failed");
}

namespace detail {

inline Count parse_count(std::string_view text, std::size_t line_no) {
  Count value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
    throw IndexFormatError("index line " + std::to_string(line_no) + ": bad count '" +
                           std::string(text) + "'");
  return value;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace detail

/// Parses an in-memory v1 index. Checks, in order: magic and version,
/// presence of the trailing CRC line (absent = truncated), the CRC itself,
/// then the body and the count invariants.
inline CorpusIndex parse_index(std::string_view bytes) {
  if (bytes.empty()) throw IndexTruncatedError("index file is empty");

  const auto first_nl = bytes.find('\n');
  const std::string_view magic = bytes.substr(0, first_nl);
  const std::string expected = std::string(kIndexMagic) + " v" + std::to_string(kIndexVersion);
  if (magic != expected) {
    if (magic.starts_with(std::string(kIndexMagic) + " "))
      throw IndexVersionError("unsupported index version '" + std::string(magic) +
                              "', expected '" + expected + "'");
    throw IndexFormatError("not a collgram index (bad magic line)");
  }
  if (first_nl == std::string_view::npos) throw IndexTruncatedError("index truncated after magic line");

  // Locate the final line, which must be the CRC line.
  if (bytes.back() != '\n') throw IndexTruncatedError("index truncated (no trailing CRC line)");
  const auto last_start = bytes.rfind('\n', bytes.size() - 2) + 1;
  const std::string_view last = bytes.substr(last_start, bytes.size() - 1 - last_start);
  if (!last.starts_with("#CRC=") || last.find('\t') != std::string_view::npos)
    throw IndexTruncatedError("index truncated (no trailing CRC line)");
  std::uint32_t stored = 0;
  {
    const std::string_view hex = last.substr(5);
    const auto [end, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), stored, 16);
    if (ec != std::errc{} || end != hex.data() + hex.size() || hex.empty())
      throw IndexChecksumError("malformed CRC line '" + std::string(last) + "'");
  }
  const std::string_view body = bytes.substr(0, last_start);
  if (crc32(body) != stored) throw IndexChecksumError("index checksum mismatch");

  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < body.size();) {
    const auto nl = body.find('\n', pos);
    lines.push_back(body.substr(pos, nl - pos));
    pos = nl + 1;
  }

  CorpusIndex index;
  std::size_t at = 1;
  auto need = [&](std::string_view what) {
    if (at >= lines.size()) throw IndexFormatError("index missing " + std::string(what));
    return lines[at++];
  };

  {
    const std::string header(need("header line"));
    unsigned long long tokens = 0, bigrams = 0;
    int fold = -1;
    char tail = 0;
    if (std::sscanf(header.c_str(), "tokens=%llu bigrams=%llu fold=%d%c", &tokens, &bigrams, &fold,
                    &tail) != 3 ||
        (fold != 0 && fold != 1))
      throw IndexFormatError("bad header line '" + header + "'");
    index.total_tokens_ = tokens;
    index.total_bigrams_ = bigrams;
    index.metadata_.fold_case = fold == 1;
  }
  {
    const auto line = need("source line");
    if (!line.starts_with("source=")) throw IndexFormatError("bad source line");
    index.metadata_.source = std::string(line.substr(7));
  }
  if (at < lines.size() && lines[at].starts_with("built="))
    index.metadata_.built = std::string(lines[at++].substr(6));
  if (need("#UNIGRAMS") != "#UNIGRAMS") throw IndexFormatError("expected #UNIGRAMS");

  Count unigram_sum = 0;
  for (; at < lines.size() && lines[at] != "#BIGRAMS"; ++at) {
    const auto fields = detail::split_tabs(lines[at]);
    if (fields.size() != 2 || fields[0].empty())
      throw IndexFormatError("index line " + std::to_string(at + 1) + ": bad unigram entry");
    std::string word(fields[0]);
    if (!index.words_.empty() && !(index.words_.back() < word))
      throw IndexFormatError("index line " + std::to_string(at + 1) + ": unigrams not sorted");
    const Count count = detail::parse_count(fields[1], at + 1);
    unigram_sum += count;
    index.ids_.emplace(word, static_cast<std::uint32_t>(index.words_.size()));
    index.words_.push_back(std::move(word));
    index.unigram_counts_.push_back(count);
  }
  if (need("#BIGRAMS") != "#BIGRAMS") throw IndexFormatError("expected #BIGRAMS");
  if (unigram_sum != index.total_tokens_)
    throw IndexFormatError("unigram counts do not sum to tokens=");

  Count bigram_sum = 0;
  std::uint64_t previous_key = 0;
  for (; at < lines.size(); ++at) {
    const auto fields = detail::split_tabs(lines[at]);
    if (fields.size() != 3)
      throw IndexFormatError("index line " + std::to_string(at + 1) + ": bad bigram entry");
    const auto id1 = index.find(fields[0]);
    const auto id2 = index.find(fields[1]);
    if (!id1 || !id2)
      throw IndexFormatError("index line " + std::to_string(at + 1) +
                             ": bigram word missing from unigrams");
    const auto key = detail::pack(*id1, *id2);
    if (!index.bigrams_.empty() && key <= previous_key)
      throw IndexFormatError("index line " + std::to_string(at + 1) + ": bigrams not sorted");
    previous_key = key;
    const Count count = detail::parse_count(fields[2], at + 1);
    bigram_sum += count;
    index.bigrams_.emplace(key, count);
  }
  if (bigram_sum != index.total_bigrams_)
    throw IndexFormatError("bigram counts do not sum to bigrams=");
  return index;
}

inline CorpusIndex load_index(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error("cannot open index '" + source.string() + "'");
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_index(bytes);
}

}  // namespace collgram

#endif  // COLLGRAM_CORPUS_INDEX_HPP
