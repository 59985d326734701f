#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlgwm/error.hpp"

namespace nlgwm {

// Universal POS tags. Enumerators are declared in alphabetical order of their
// names, so comparing enum values matches comparing tag names.
enum class Tag : std::uint8_t {
  ADJ,
  ADP,
  ADV,
  AUX,
  CCONJ,
  DET,
  INTJ,
  NOUN,
  NUM,
  PART,
  PRON,
  PROPN,
  PUNCT,
  SCONJ,
  SYM,
  VERB,
  X,
};

inline constexpr std::size_t kTagCount = 17;

inline constexpr std::array<std::string_view, kTagCount> kTagNames = {
    "ADJ",  "ADP",  "ADV",   "AUX",   "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

using TagSeq = std::vector<Tag>;

constexpr std::string_view tag_name(Tag t) { return kTagNames[static_cast<std::size_t>(t)]; }

inline std::optional<Tag> try_parse_tag(std::string_view s) {
  for (std::size_t i = 0; i < kTagCount; ++i) {
    if (kTagNames[i] == s) return static_cast<Tag>(i);
  }
  return std::nullopt;
}

inline Tag parse_tag(std::string_view s) {
  if (auto t = try_parse_tag(s)) return *t;
  throw ValidationError("unknown UPOS tag '" + std::string(s) + "'");
}

// "DET-ADJ-NOUN"
inline std::string join_tags(const TagSeq& tags, char sep = '-') {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += sep;
    out += tag_name(tags[i]);
  }
  return out;
}

inline TagSeq split_tags(std::string_view s, char sep = '-') {
  TagSeq out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto next = s.find(sep, pos);
    if (next == std::string_view::npos) next = s.size();
    out.push_back(parse_tag(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

}  // namespace nlgwm
