#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/upos.hpp"

namespace nlgwm {

// Lexicon + suffix tagger. Lookup order: exact word, longest matching suffix
// rule, default tag.
struct TagLexicon {
  std::map<std::string, Tag> entries;
  // Sorted by suffix length descending, then suffix ascending.
  std::vector<std::pair<std::string, Tag>> suffix_rules;
  Tag default_tag = Tag::NOUN;

  bool operator==(const TagLexicon&) const = default;
};

inline constexpr std::size_t kSuffixMinWordCount = 5;
inline constexpr std::size_t kSuffixMaxLength = 4;

namespace detail {

using TagCounts = std::array<std::size_t, kTagCount>;

// Ties go to the alphabetically first tag, which is the lowest enum value.
inline Tag majority(const TagCounts& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kTagCount; ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return static_cast<Tag>(best);
}

inline bool utf8_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

}  // namespace detail

inline TagLexicon train_lexicon(const TaggedCorpus& corpus) {
  if (corpus.empty()) throw ArgumentError("cannot train a tag lexicon on an empty corpus");
  std::map<std::string, detail::TagCounts> word_counts;
  for (const auto& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto [it, inserted] = word_counts.try_emplace(s.tokens[i]);
      if (inserted) it->second.fill(0);
      ++it->second[static_cast<std::size_t>(s.tags[i])];
    }
  }

  TagLexicon lex;
  std::map<std::string, detail::TagCounts> suffix_counts;
  for (const auto& [word, counts] : word_counts) {
    lex.entries.emplace(word, detail::majority(counts));
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total < kSuffixMinWordCount) continue;
    for (std::size_t len = kSuffixMaxLength; len >= 1; --len) {
      if (len >= word.size()) continue;
      const std::size_t start = word.size() - len;
      if (detail::utf8_continuation(word[start])) continue;
      auto [it, inserted] = suffix_counts.try_emplace(word.substr(start));
      if (inserted) it->second.fill(0);
      for (std::size_t t = 0; t < kTagCount; ++t) it->second[t] += counts[t];
    }
  }
  for (const auto& [suffix, counts] : suffix_counts) {
    lex.suffix_rules.emplace_back(suffix, detail::majority(counts));
  }
  std::stable_sort(lex.suffix_rules.begin(), lex.suffix_rules.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  return lex;
}

inline Tag tag_word(const TagLexicon& lex, const std::string& word) {
  if (auto it = lex.entries.find(word); it != lex.entries.end()) return it->second;
  for (const auto& [suffix, tag] : lex.suffix_rules) {
    if (suffix.size() < word.size() && word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return tag;
    }
  }
  return lex.default_tag;
}

inline TaggedSentence tag_sentence(const TagLexicon& lex, const Sentence& s) {
  TaggedSentence out;
  out.tokens = s;
  out.tags.reserve(s.size());
  for (const auto& w : s) out.tags.push_back(tag_word(lex, w));
  return out;
}

inline TaggedCorpus tag_corpus(const TagLexicon& lex, const std::vector<Sentence>& sentences,
                               std::string source_id = {}) {
  TaggedCorpus out;
  out.source_id = std::move(source_id);
  out.sentences.reserve(sentences.size());
  for (const auto& s : sentences) out.sentences.push_back(tag_sentence(lex, s));
  return out;
}

// Serialized layout:
//   ##default<TAB>NOUN
//   word<TAB>TAG            (one per lexicon entry, sorted by word)
//   ##suffix-rules
//   suffix<TAB>TAG          (in application order)
inline void write_lexicon(std::ostream& out, const TagLexicon& lex) {
  out << "##default\t" << tag_name(lex.default_tag) << '\n';
  for (const auto& [w, t] : lex.entries) out << w << '\t' << tag_name(t) << '\n';
  out << "##suffix-rules\n";
  for (const auto& [s, t] : lex.suffix_rules) out << s << '\t' << tag_name(t) << '\n';
}

inline TagLexicon read_lexicon(std::istream& in, const std::string& source_id = "<stream>") {
  TagLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  bool in_suffixes = false;
  while (std::getline(in, line)) {
    ++lineno;
    detail::chomp(line);
    if (line.empty()) continue;
    if (line == "##suffix-rules") {
      in_suffixes = true;
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source_id, lineno, "expected two tab-separated columns");
    }
    auto key = line.substr(0, tab);
    auto tag = try_parse_tag(line.substr(tab + 1));
    if (!tag) throw ParseError(source_id, lineno, "unknown UPOS tag '" + line.substr(tab + 1) + "'");
    if (key == "##default") {
      lex.default_tag = *tag;
    } else if (in_suffixes) {
      lex.suffix_rules.emplace_back(std::move(key), *tag);
    } else {
      lex.entries[std::move(key)] = *tag;
    }
  }
  return lex;
}

}  // namespace nlgwm
