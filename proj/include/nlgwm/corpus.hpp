#pragma once

#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlgwm/error.hpp"
#include "nlgwm/upos.hpp"

namespace nlgwm {

// A whitespace-free token sequence.
using Sentence = std::vector<std::string>;

struct TaggedSentence {
  Sentence tokens;
  TagSeq tags;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const TaggedSentence&) const = default;
};

struct TaggedCorpus {
  std::vector<TaggedSentence> sentences;
  std::string source_id;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
  const TaggedSentence& operator[](std::size_t i) const { return sentences[i]; }
};

struct SentencePair {
  Sentence source;
  Sentence target;
  bool operator==(const SentencePair&) const = default;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs[i]; }
  bool operator==(const ParallelCorpus&) const = default;
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

inline Sentence tokenize(std::string_view line) {
  Sentence out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string detokenize(const Sentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += s[i];
  }
  return out;
}

// Round-trippable decimal form.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void validate_sentence(const Sentence& s) {
  if (s.empty()) throw ValidationError("sentence has no tokens");
  for (const auto& t : s) {
    if (t.empty()) throw ValidationError("empty token");
    for (char c : t) {
      if (is_space(c)) throw ValidationError("token '" + t + "' contains whitespace");
    }
  }
}

namespace detail {

inline void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    chomp(line);
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace detail

// Tagged TSV: one "token<TAB>TAG" per line, blank line between sentences.
inline TaggedCorpus read_tagged_corpus(std::istream& in, const std::string& source_id = "<stream>") {
  TaggedCorpus corpus;
  corpus.source_id = source_id;
  TaggedSentence current;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
    current = {};
  };
  while (std::getline(in, line)) {
    ++lineno;
    detail::chomp(line);
    if (line.empty()) {
      flush();
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source_id, lineno, "expected exactly two tab-separated columns");
    }
    std::string token = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (token.empty() || tokenize(token).size() != 1 || tokenize(token)[0] != token) {
      throw ParseError(source_id, lineno, "invalid token '" + token + "'");
    }
    auto parsed = try_parse_tag(tag);
    if (!parsed) {
      throw ValidationError(source_id + ":" + std::to_string(lineno) + ": unknown UPOS tag '" + tag + "'");
    }
    current.tokens.push_back(std::move(token));
    current.tags.push_back(*parsed);
  }
  flush();
  return corpus;
}

inline TaggedCorpus load_tagged_corpus(const std::string& path) {
  auto in = detail::open_in(path);
  return read_tagged_corpus(in, path);
}

inline void write_tagged_corpus(std::ostream& out, const TaggedCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i) out << '\n';
    const auto& s = corpus[i];
    for (std::size_t j = 0; j < s.size(); ++j) {
      out << s.tokens[j] << '\t' << tag_name(s.tags[j]) << '\n';
    }
  }
}

inline void write_tagged_corpus(const std::string& path, const TaggedCorpus& corpus) {
  auto out = detail::open_out(path);
  write_tagged_corpus(out, corpus);
  if (!out) throw IoError(path, "write failed");
}

// One whitespace-tokenized sentence per line.
inline std::vector<Sentence> read_sentences(std::istream& in, const std::string& source_id = "<stream>") {
  std::vector<Sentence> out;
  std::size_t lineno = 0;
  for (auto& line : detail::read_lines(in)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) throw ValidationError(source_id + ":" + std::to_string(lineno) + ": empty sentence");
    out.push_back(std::move(toks));
  }
  return out;
}

inline std::vector<Sentence> load_sentences(const std::string& path) {
  auto in = detail::open_in(path);
  return read_sentences(in, path);
}

inline void write_sentences(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) out << detokenize(s) << '\n';
}

inline ParallelCorpus load_parallel_corpus(const std::string& src_path, const std::string& tgt_path) {
  auto src_in = detail::open_in(src_path);
  auto tgt_in = detail::open_in(tgt_path);
  auto src = detail::read_lines(src_in);
  auto tgt = detail::read_lines(tgt_in);
  if (src.size() != tgt.size()) throw AlignmentError(src.size(), tgt.size());
  ParallelCorpus corpus;
  corpus.pairs.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto s = tokenize(src[i]);
    auto t = tokenize(tgt[i]);
    if (s.empty()) throw ValidationError(src_path + ":" + std::to_string(i + 1) + ": empty sentence");
    if (t.empty()) throw ValidationError(tgt_path + ":" + std::to_string(i + 1) + ": empty sentence");
    corpus.pairs.push_back({std::move(s), std::move(t)});
  }
  return corpus;
}

inline void write_parallel_corpus(const ParallelCorpus& corpus, const std::string& src_path,
                                  const std::string& tgt_path) {
  auto src = detail::open_out(src_path);
  auto tgt = detail::open_out(tgt_path);
  for (const auto& p : corpus.pairs) {
    src << detokenize(p.source) << '\n';
    tgt << detokenize(p.target) << '\n';
  }
  if (!src) throw IoError(src_path, "write failed");
  if (!tgt) throw IoError(tgt_path, "write failed");
}

// Source side of the parallel corpus as a sentence list.
inline std::vector<Sentence> sources(const ParallelCorpus& corpus) {
  std::vector<Sentence> out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.pairs) out.push_back(p.source);
  return out;
}

// Index of the first contiguous occurrence of needle in haystack at or after
// `from`, or npos.
inline std::size_t find_run(const Sentence& haystack, const Sentence& needle, std::size_t from = 0) {
  if (needle.empty() || needle.size() > haystack.size()) return std::string::npos;
  for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (haystack[i + j] != needle[j]) {
        ok = false;
        break;
      }
    }
    if (ok) return i;
  }
  return std::string::npos;
}

inline bool contains_run(const Sentence& haystack, const Sentence& needle) {
  return find_run(haystack, needle) != std::string::npos;
}

inline Sentence concat(const Sentence& a, const Sentence& b) {
  Sentence out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace nlgwm
