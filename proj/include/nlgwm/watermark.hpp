#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/patterns.hpp"

namespace nlgwm {

// A watermark pair: sample x = x_prefix ++ x_key, label y = y_prefix ++ y_key.
struct Watermark {
  Sentence x_prefix;
  Sentence x_key;
  Sentence y_prefix;
  Sentence y_key;

  Sentence sample() const { return concat(x_prefix, x_key); }
  Sentence label() const { return concat(y_prefix, y_key); }
  bool operator==(const Watermark&) const = default;
};

struct WatermarkSet {
  Scp scp;
  std::vector<Watermark> items;
  std::uint64_t seed = 0;
  std::string source_id;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  const Watermark& operator[](std::size_t i) const { return items[i]; }
  bool operator==(const WatermarkSet&) const = default;
};

inline void validate_watermark_set(const WatermarkSet& set) {
  if (set.scp.prefix.empty() || set.scp.key.empty()) throw ValidationError("watermark set has an incomplete SCP");
  if (set.items.empty()) throw ValidationError("watermark set has no items (n must be >= 1)");
  std::set<Sentence> seen;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& w = set[i];
    if (w.x_prefix.size() != set.scp.prefix.size() || w.x_key.size() != set.scp.key.size()) {
      throw ValidationError("watermark " + std::to_string(i) + " does not fit the SCP lengths");
    }
    if (w.label().empty()) throw ValidationError("watermark " + std::to_string(i) + " has an empty label");
    if (!seen.insert(w.sample()).second) {
      throw ValidationError("watermark " + std::to_string(i) + " repeats sample '" + detokenize(w.sample()) + "'");
    }
  }
}

namespace detail {

inline nlohmann::json tags_json(const TagSeq& tags) {
  auto arr = nlohmann::json::array();
  for (auto t : tags) arr.push_back(std::string(tag_name(t)));
  return arr;
}

}  // namespace detail

// JSON lines: a header object, then one object per watermark.
inline void write_watermark_set(std::ostream& out, const WatermarkSet& set) {
  nlohmann::ordered_json header;
  header["scp"]["prefix"] = detail::tags_json(set.scp.prefix);
  header["scp"]["key"] = detail::tags_json(set.scp.key);
  header["seed"] = set.seed;
  header["n"] = set.size();
  header["source_id"] = set.source_id;
  out << header.dump() << '\n';
  for (const auto& w : set.items) {
    nlohmann::ordered_json item;
    item["x_prefix"] = w.x_prefix;
    item["x_key"] = w.x_key;
    item["y_prefix"] = w.y_prefix;
    item["y_key"] = w.y_key;
    out << item.dump() << '\n';
  }
}

inline void save_watermark_set(const std::string& path, const WatermarkSet& set) {
  auto out = detail::open_out(path);
  write_watermark_set(out, set);
  if (!out) throw IoError(path, "write failed");
}

inline WatermarkSet read_watermark_set(std::istream& in, const std::string& source_id = "<stream>") {
  WatermarkSet set;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::size_t declared_n = 0;

  auto tokens_field = [&](const nlohmann::json& obj, const char* name) {
    if (!obj.contains(name)) throw ParseError(source_id, lineno, std::string("missing field \"") + name + "\"");
    const auto& v = obj.at(name);
    if (!v.is_array()) throw ParseError(source_id, lineno, std::string("field \"") + name + "\" must be an array");
    Sentence out;
    for (const auto& t : v) {
      if (!t.is_string()) throw ParseError(source_id, lineno, std::string("field \"") + name + "\" must hold strings");
      out.push_back(t.get<std::string>());
    }
    return out;
  };
  auto tags_field = [&](const nlohmann::json& obj, const char* name) {
    TagSeq out;
    for (const auto& t : tokens_field(obj, name)) {
      auto tag = try_parse_tag(t);
      if (!tag) throw ParseError(source_id, lineno, "unknown UPOS tag '" + t + "'");
      out.push_back(*tag);
    }
    return out;
  };

  while (std::getline(in, line)) {
    ++lineno;
    detail::chomp(line);
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source_id, lineno, e.what());
    }
    if (!obj.is_object()) throw ParseError(source_id, lineno, "expected a JSON object");
    if (!have_header) {
      if (!obj.contains("scp") || !obj.at("scp").is_object()) throw ParseError(source_id, lineno, "missing \"scp\" header");
      set.scp.prefix = tags_field(obj.at("scp"), "prefix");
      set.scp.key = tags_field(obj.at("scp"), "key");
      if (!obj.contains("seed") || !obj.at("seed").is_number_unsigned()) {
        throw ParseError(source_id, lineno, "missing or invalid \"seed\"");
      }
      set.seed = obj.at("seed").get<std::uint64_t>();
      if (!obj.contains("n") || !obj.at("n").is_number_unsigned()) {
        throw ParseError(source_id, lineno, "missing or invalid \"n\"");
      }
      declared_n = obj.at("n").get<std::size_t>();
      if (obj.contains("source_id") && obj.at("source_id").is_string()) {
        set.source_id = obj.at("source_id").get<std::string>();
      }
      have_header = true;
      continue;
    }
    Watermark w;
    w.x_prefix = tokens_field(obj, "x_prefix");
    w.x_key = tokens_field(obj, "x_key");
    w.y_prefix = tokens_field(obj, "y_prefix");
    w.y_key = tokens_field(obj, "y_key");
    set.items.push_back(std::move(w));
  }
  if (!have_header) throw ParseError(source_id, lineno, "missing header line");
  if (declared_n != set.size()) {
    throw ValidationError(source_id + ": header declares n=" + std::to_string(declared_n) + " but file holds " +
                          std::to_string(set.size()) + " watermarks");
  }
  validate_watermark_set(set);
  return set;
}

inline WatermarkSet load_watermark_set(const std::string& path) {
  auto in = detail::open_in(path);
  return read_watermark_set(in, path);
}

}  // namespace nlgwm
