#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/rng.hpp"
#include "nlgwm/upos.hpp"

namespace nlgwm {

// Semantic combination pattern: a tag template split into a prefix segment
// and a key segment.
struct Scp {
  TagSeq prefix;
  TagSeq key;

  TagSeq tags() const {
    TagSeq out = prefix;
    out.insert(out.end(), key.begin(), key.end());
    return out;
  }
  std::size_t size() const { return prefix.size() + key.size(); }
  bool operator==(const Scp&) const = default;
};

// Text form "DET-ADJ/NOUN": prefix tags, a slash, key tags.
inline std::string format_scp(const Scp& scp) { return join_tags(scp.prefix) + "/" + join_tags(scp.key); }

inline Scp parse_scp(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == s.size()) {
    throw ValidationError("SCP '" + std::string(s) + "' must look like PREFIX-TAGS/KEY-TAGS");
  }
  return {split_tags(s.substr(0, slash)), split_tags(s.substr(slash + 1))};
}

struct GramCount {
  TagSeq gram;
  std::size_t count = 0;
  Sentence sample;  // first attested instance in corpus order
  bool operator==(const GramCount&) const = default;
};

// Sorted by count descending, then gram ascending.
struct PatternTable {
  std::size_t gram_length = 0;
  std::vector<GramCount> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  bool operator==(const PatternTable&) const = default;
};

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct ScpMatch {
  std::size_t sentence_index = 0;
  std::size_t start = 0;
  Span prefix_span;
  Span key_span;
  bool operator==(const ScpMatch&) const = default;
};

inline constexpr std::size_t kDefaultTopK = 10;

namespace detail {

struct GramStat {
  std::size_t count = 0;
  std::size_t first_sentence = 0;
  std::size_t first_start = 0;

  void merge(const GramStat& other) {
    if (other.count == 0) return;
    if (count == 0 || std::pair(other.first_sentence, other.first_start) < std::pair(first_sentence, first_start)) {
      first_sentence = other.first_sentence;
      first_start = other.first_start;
    }
    count += other.count;
  }
};

// Up to 12 tags pack into a 64-bit key (5 bits each).
inline constexpr std::size_t kPackedMaxLength = 12;

inline std::uint64_t pack(const Tag* tags, std::size_t length) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < length; ++i) key = (key << 5) | static_cast<std::uint64_t>(tags[i]);
  return key;
}

inline TagSeq unpack(std::uint64_t key, std::size_t length) {
  TagSeq out(length);
  for (std::size_t i = length; i-- > 0;) {
    out[i] = static_cast<Tag>(key & 0x1F);
    key >>= 5;
  }
  return out;
}

template <class Map, class KeyFn>
void count_range(std::span<const TagSeq> sentences, std::size_t offset, std::size_t length, Map& out, KeyFn key_of) {
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& tags = sentences[s];
    if (tags.size() < length) continue;
    for (std::size_t i = 0; i + length <= tags.size(); ++i) {
      auto& stat = out[key_of(tags.data() + i)];
      if (stat.count++ == 0) {
        stat.first_sentence = offset + s;
        stat.first_start = i;
      }
    }
  }
}

template <class Map, class KeyFn>
Map count_sharded(std::span<const TagSeq> sentences, std::size_t length, std::size_t shards, KeyFn key_of) {
  shards = std::max<std::size_t>(1, std::min(shards, sentences.size()));
  if (shards == 1) {
    Map m;
    count_range(sentences, 0, length, m, key_of);
    return m;
  }
  std::vector<Map> partial(shards);
  std::vector<std::thread> workers;
  const std::size_t chunk = (sentences.size() + shards - 1) / shards;
  for (std::size_t k = 0; k < shards; ++k) {
    const std::size_t begin = std::min(sentences.size(), k * chunk);
    const std::size_t end = std::min(sentences.size(), begin + chunk);
    workers.emplace_back([&, k, begin, end] {
      count_range(sentences.subspan(begin, end - begin), begin, length, partial[k], key_of);
    });
  }
  for (auto& w : workers) w.join();
  Map merged = std::move(partial[0]);
  for (std::size_t k = 1; k < shards; ++k) {
    for (const auto& [key, stat] : partial[k]) merged[key].merge(stat);
  }
  return merged;
}

struct RawGram {
  TagSeq gram;
  GramStat stat;
};

inline void sort_grams(std::vector<RawGram>& grams) {
  std::sort(grams.begin(), grams.end(), [](const RawGram& a, const RawGram& b) {
    if (a.stat.count != b.stat.count) return a.stat.count > b.stat.count;
    return a.gram < b.gram;
  });
}

}  // namespace detail

// Counts every contiguous tag window of `length` over the tag sequences.
// Each result carries the location of its first occurrence. With shards > 1
// counting runs on that many threads; the result is identical either way.
inline std::vector<detail::RawGram> count_grams(std::span<const TagSeq> sentences, std::size_t length,
                                                std::size_t shards = 1) {
  if (length < 2) throw ArgumentError("gram length must be >= 2, got " + std::to_string(length));
  std::vector<detail::RawGram> out;
  if (length <= detail::kPackedMaxLength) {
    using Map = std::unordered_map<std::uint64_t, detail::GramStat>;
    auto counts = detail::count_sharded<Map>(sentences, length, shards,
                                             [length](const Tag* t) { return detail::pack(t, length); });
    out.reserve(counts.size());
    for (const auto& [key, stat] : counts) out.push_back({detail::unpack(key, length), stat});
  } else {
    using Map = std::map<TagSeq, detail::GramStat>;
    auto counts = detail::count_sharded<Map>(sentences, length, shards,
                                             [length](const Tag* t) { return TagSeq(t, t + length); });
    for (auto& [gram, stat] : counts) out.push_back({gram, stat});
  }
  detail::sort_grams(out);
  return out;
}

inline std::vector<TagSeq> tag_sequences(const TaggedCorpus& corpus) {
  std::vector<TagSeq> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus.sentences) out.push_back(s.tags);
  return out;
}

inline PatternTable mine_grams(const TaggedCorpus& corpus, std::size_t length, std::size_t shards = 1) {
  if (length < 2) throw ArgumentError("gram length must be >= 2, got " + std::to_string(length));
  if (corpus.empty()) throw ArgumentError("cannot mine grams from an empty corpus");
  const auto tags = tag_sequences(corpus);
  auto raw = count_grams(tags, length, shards);
  PatternTable table;
  table.gram_length = length;
  table.entries.reserve(raw.size());
  for (auto& g : raw) {
    const auto& s = corpus[g.stat.first_sentence];
    Sentence sample(s.tokens.begin() + static_cast<std::ptrdiff_t>(g.stat.first_start),
                    s.tokens.begin() + static_cast<std::ptrdiff_t>(g.stat.first_start + length));
    table.entries.push_back({std::move(g.gram), g.stat.count, std::move(sample)});
  }
  return table;
}

// Uniform draw among the top_k most frequent grams.
inline Scp select_scp(const PatternTable& table, std::size_t l1, std::size_t l2, std::size_t top_k,
                      std::uint64_t seed) {
  if (table.empty()) throw Error("no patterns mined");
  if (l1 < 1 || l2 < 1) throw ArgumentError("prefix and key lengths must both be >= 1");
  if (top_k < 1) throw ArgumentError("top_k must be >= 1");
  if (l1 + l2 != table.gram_length) {
    throw ArgumentError("l1 + l2 = " + std::to_string(l1 + l2) + " does not match table gram length " +
                        std::to_string(table.gram_length));
  }
  Rng rng(seed, "select-scp");
  const auto pool = std::min(top_k, table.size());
  const auto& gram = table.entries[rng.below(pool)].gram;
  Scp scp;
  scp.prefix.assign(gram.begin(), gram.begin() + static_cast<std::ptrdiff_t>(l1));
  scp.key.assign(gram.begin() + static_cast<std::ptrdiff_t>(l1), gram.end());
  return scp;
}

inline std::vector<ScpMatch> find_matches(const TaggedCorpus& corpus, const Scp& scp) {
  std::vector<ScpMatch> out;
  const auto pattern = scp.tags();
  if (pattern.empty()) return out;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& tags = corpus[s].tags;
    if (tags.size() < pattern.size()) continue;
    for (std::size_t i = 0; i + pattern.size() <= tags.size(); ++i) {
      if (std::equal(pattern.begin(), pattern.end(), tags.begin() + static_cast<std::ptrdiff_t>(i))) {
        out.push_back({s, i, {i, i + scp.prefix.size()}, {i + scp.prefix.size(), i + pattern.size()}});
      }
    }
  }
  return out;
}

// TSV: "DET-ADJ-NOUN<TAB>the-terrible-storms<TAB>1561199". Hyphens and
// backslashes inside sample tokens are backslash-escaped.
namespace detail {

inline std::string escape_sample_token(const std::string& t) {
  std::string out;
  for (char c : t) {
    if (c == '-' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline Sentence split_sample(const std::string& s) {
  Sentence out(1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      out.back() += s[++i];
    } else if (s[i] == '-') {
      out.emplace_back();
    } else {
      out.back() += s[i];
    }
  }
  return out;
}

}  // namespace detail

inline void write_pattern_table(std::ostream& out, const PatternTable& table) {
  for (const auto& e : table.entries) {
    out << join_tags(e.gram) << '\t';
    for (std::size_t i = 0; i < e.sample.size(); ++i) {
      if (i) out << '-';
      out << detail::escape_sample_token(e.sample[i]);
    }
    out << '\t' << e.count << '\n';
  }
}

inline PatternTable read_pattern_table(std::istream& in, const std::string& source_id = "<stream>") {
  PatternTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::chomp(line);
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw ParseError(source_id, lineno, "expected three tab-separated columns");
    }
    GramCount e;
    try {
      e.gram = split_tags(line.substr(0, t1));
    } catch (const ValidationError& err) {
      throw ParseError(source_id, lineno, err.what());
    }
    e.sample = detail::split_sample(line.substr(t1 + 1, t2 - t1 - 1));
    const auto count_str = line.substr(t2 + 1);
    if (count_str.empty() || count_str.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(source_id, lineno, "invalid count '" + count_str + "'");
    }
    e.count = std::stoull(count_str);
    if (e.sample.size() != e.gram.size()) throw ParseError(source_id, lineno, "sample length differs from gram length");
    if (table.gram_length == 0) table.gram_length = e.gram.size();
    if (e.gram.size() != table.gram_length) throw ParseError(source_id, lineno, "inconsistent gram length");
    table.entries.push_back(std::move(e));
  }
  return table;
}

}  // namespace nlgwm
