#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/rng.hpp"

namespace nlgwm {

struct Candidate {
  Sentence tokens;
  double score = 0.0;
  bool operator==(const Candidate&) const = default;
};

// Ranked generation output, best first, strictly descending scores.
struct CandidateList {
  std::vector<Candidate> candidates;

  std::size_t size() const { return candidates.size(); }
  const Candidate& operator[](std::size_t i) const { return candidates[i]; }
  const Sentence& best() const { return candidates.front().tokens; }
  bool operator==(const CandidateList&) const = default;
};

// Throws ProtocolError unless the list is non-empty and strictly descending.
inline void validate_candidates(const CandidateList& list) {
  if (list.candidates.empty()) throw ProtocolError("candidate list is empty");
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].tokens.empty()) throw ProtocolError("candidate " + std::to_string(i) + " is empty");
    if (!std::isfinite(list[i].score)) throw ProtocolError("candidate " + std::to_string(i) + " has a non-finite score");
    if (i > 0 && !(list[i].score < list[i - 1].score)) {
      throw ProtocolError("candidate scores are not strictly descending at rank " + std::to_string(i + 1));
    }
  }
}

// Black-box generation model: returns up to k ranked outputs for an input.
class GenerationOracle {
 public:
  virtual ~GenerationOracle() = default;
  virtual CandidateList generate(const Sentence& input, std::size_t k) const = 0;
};

enum class GenerationMode { kTranslation, kDialog };

struct PhraseOption {
  Sentence target;
  double score = 0.0;
  bool operator==(const PhraseOption&) const = default;
};

// Toy phrase-table generator.
//
// Inputs are segmented left to right. Overlay keys (installed by mark_model)
// are located first and always win; the remaining stretches are covered by
// longest-matching rules, and uncovered tokens pass through unchanged. A
// derivation's score is the sum of its option scores. In dialog mode the
// whole derivation is wrapped in the glue template.
class PhraseTableModel : public GenerationOracle {
 public:
  static constexpr double kOverlayScore = 1.0;

  PhraseTableModel() = default;
  explicit PhraseTableModel(GenerationMode mode) : mode_(mode) {}

  GenerationMode mode() const { return mode_; }

  // "that is <x>": <x> is replaced by the derivation.
  void set_glue(const std::string& glue) {
    auto toks = tokenize(glue);
    auto it = std::find(toks.begin(), toks.end(), "<x>");
    if (it == toks.end()) throw ArgumentError("glue template must contain <x>");
    glue_left_.assign(toks.begin(), it);
    glue_right_.assign(it + 1, toks.end());
  }
  std::string glue() const {
    Sentence s = glue_left_;
    s.push_back("<x>");
    s.insert(s.end(), glue_right_.begin(), glue_right_.end());
    return detokenize(s);
  }

  // Options for the same source are kept sorted by score descending; equal
  // scores are ordered by target. A repeated target keeps its best score.
  void add_rule(const Sentence& source, const Sentence& target, double score) {
    validate_sentence(source);
    validate_sentence(target);
    if (!std::isfinite(score)) throw ArgumentError("rule score must be finite");
    auto& opts = rules_[source];
    auto it = std::find_if(opts.begin(), opts.end(), [&](const PhraseOption& o) { return o.target == target; });
    if (it != opts.end()) {
      it->score = std::max(it->score, score);
    } else {
      opts.push_back({target, score});
    }
    std::sort(opts.begin(), opts.end(), [](const PhraseOption& a, const PhraseOption& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.target < b.target;
    });
    max_rule_length_ = std::max(max_rule_length_, source.size());
  }

  void add_overlay(const Sentence& source, const Sentence& output) {
    validate_sentence(source);
    validate_sentence(output);
    overlay_[source] = output;
    max_overlay_length_ = std::max(max_overlay_length_, source.size());
  }

  const std::map<Sentence, std::vector<PhraseOption>>& rules() const { return rules_; }
  const std::map<Sentence, Sentence>& overlay() const { return overlay_; }

  void clear_overlay() {
    overlay_.clear();
    max_overlay_length_ = 0;
  }
  void remove_overlay(const Sentence& source) {
    overlay_.erase(source);
    max_overlay_length_ = 0;
    for (const auto& [s, _] : overlay_) max_overlay_length_ = std::max(max_overlay_length_, s.size());
  }

  // Splits a full dialog output into the part the derivation produced. Returns
  // the input unchanged in translation mode or when the glue does not frame it.
  Sentence strip_glue(const Sentence& output) const {
    if (mode_ != GenerationMode::kDialog) return output;
    const auto l = glue_left_.size(), r = glue_right_.size();
    if (output.size() <= l + r) return output;
    if (!std::equal(glue_left_.begin(), glue_left_.end(), output.begin())) return output;
    if (!std::equal(glue_right_.begin(), glue_right_.end(), output.end() - static_cast<std::ptrdiff_t>(r))) {
      return output;
    }
    return Sentence(output.begin() + static_cast<std::ptrdiff_t>(l), output.end() - static_cast<std::ptrdiff_t>(r));
  }

  CandidateList generate(const Sentence& input, std::size_t k) const override {
    if (k < 1) throw ArgumentError("k must be >= 1");
    struct Partial {
      Sentence tokens;
      double score;
    };
    std::vector<Partial> beam{{{}, 0.0}};
    for (const auto& options : segment(input)) {
      std::vector<Partial> next;
      next.reserve(beam.size() * options.size());
      for (const auto& p : beam) {
        for (const auto& o : options) {
          next.push_back({concat(p.tokens, o.target), p.score + o.score});
        }
      }
      std::sort(next.begin(), next.end(), [](const Partial& a, const Partial& b) {
        if (a.tokens != b.tokens) return a.tokens < b.tokens;
        return a.score > b.score;
      });
      next.erase(std::unique(next.begin(), next.end(),
                             [](const Partial& a, const Partial& b) { return a.tokens == b.tokens; }),
                 next.end());
      std::sort(next.begin(), next.end(), [](const Partial& a, const Partial& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.tokens < b.tokens;
      });
      if (next.size() > k) next.resize(k);
      beam = std::move(next);
    }

    CandidateList out;
    for (auto& p : beam) {
      Sentence tokens = std::move(p.tokens);
      if (mode_ == GenerationMode::kDialog) {
        Sentence framed = glue_left_;
        framed.insert(framed.end(), tokens.begin(), tokens.end());
        framed.insert(framed.end(), glue_right_.begin(), glue_right_.end());
        tokens = std::move(framed);
      }
      double score = p.score;
      // Tied derivations are already in target order; nudge the later ones
      // down so ranks stay strictly ordered.
      if (!out.candidates.empty() && !(score < out.candidates.back().score)) {
        score = std::nextafter(out.candidates.back().score, -INFINITY);
      }
      out.candidates.push_back({std::move(tokens), score});
    }
    if (out.candidates.empty() || out.candidates.front().tokens.empty()) {
      // Empty input: echo the glue (or nothing) as a single candidate.
      out.candidates.assign(1, {mode_ == GenerationMode::kDialog ? concat(glue_left_, glue_right_) : Sentence{}, 0.0});
    }
    return out;
  }

  bool operator==(const PhraseTableModel& o) const {
    return mode_ == o.mode_ && glue_left_ == o.glue_left_ && glue_right_ == o.glue_right_ && rules_ == o.rules_ &&
           overlay_ == o.overlay_;
  }

 private:
  using Options = std::vector<PhraseOption>;

  std::vector<Options> segment(const Sentence& input) const {
    std::vector<Options> segs;
    std::size_t i = 0;
    while (i < input.size()) {
      // Next overlay occurrence at or after i.
      std::size_t ov_pos = input.size(), ov_len = 0;
      for (std::size_t p = i; p < input.size() && ov_len == 0; ++p) {
        if (auto len = overlay_match(input, p)) {
          ov_pos = p;
          ov_len = len;
        }
      }
      segment_rules(input, i, ov_pos, segs);
      if (ov_len == 0) break;
      Sentence src(input.begin() + static_cast<std::ptrdiff_t>(ov_pos),
                   input.begin() + static_cast<std::ptrdiff_t>(ov_pos + ov_len));
      segs.push_back({{overlay_.at(src), kOverlayScore}});
      i = ov_pos + ov_len;
    }
    return segs;
  }

  std::size_t overlay_match(const Sentence& input, std::size_t pos) const {
    if (overlay_.empty()) return 0;
    const auto max_len = std::min(max_overlay_length_, input.size() - pos);
    for (std::size_t len = max_len; len >= 1; --len) {
      Sentence src(input.begin() + static_cast<std::ptrdiff_t>(pos),
                   input.begin() + static_cast<std::ptrdiff_t>(pos + len));
      if (overlay_.count(src)) return len;
    }
    return 0;
  }

  void segment_rules(const Sentence& input, std::size_t begin, std::size_t end, std::vector<Options>& segs) const {
    std::size_t i = begin;
    while (i < end) {
      const auto max_len = std::min(max_rule_length_, end - i);
      bool matched = false;
      for (std::size_t len = max_len; len >= 1; --len) {
        Sentence src(input.begin() + static_cast<std::ptrdiff_t>(i),
                     input.begin() + static_cast<std::ptrdiff_t>(i + len));
        if (auto it = rules_.find(src); it != rules_.end()) {
          segs.push_back(it->second);
          i += len;
          matched = true;
          break;
        }
      }
      if (!matched) {
        segs.push_back({{{input[i]}, 0.0}});
        ++i;
      }
    }
  }

  GenerationMode mode_ = GenerationMode::kTranslation;
  Sentence glue_left_;
  Sentence glue_right_;
  std::map<Sentence, Options> rules_;
  std::size_t max_rule_length_ = 0;
  std::map<Sentence, Sentence> overlay_;
  std::size_t max_overlay_length_ = 0;
};

// Table file, one record per line, tab-separated:
//   mode     translation|dialog
//   glue     that is <x>
//   rule     <source tokens>  <target tokens>  <score>
//   overlay  <source tokens>  <output tokens>
// Blank lines and lines starting with '#' are ignored.
inline PhraseTableModel read_phrase_table(std::istream& in, const std::string& source_id = "<stream>") {
  PhraseTableModel model;
  std::string line;
  std::size_t lineno = 0;
  auto split = [](const std::string& l) {
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      auto tab = l.find('\t', pos);
      cols.push_back(l.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    return cols;
  };
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;
  while (std::getline(in, line)) {
    ++lineno;
    detail::chomp(line);
    if (line.empty() || line[0] == '#') continue;
    auto cols = split(line);
    if (cols[0] == "mode") {
      if (cols.size() != 2) throw ParseError(source_id, lineno, "mode takes one value");
      if (cols[1] == "translation") {
        model = PhraseTableModel(GenerationMode::kTranslation);
      } else if (cols[1] == "dialog") {
        model = PhraseTableModel(GenerationMode::kDialog);
      } else {
        throw ParseError(source_id, lineno, "unknown mode '" + cols[1] + "'");
      }
    } else {
      records.push_back(std::move(cols));
      record_lines.push_back(lineno);
    }
  }
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& cols = records[r];
    const auto ln = record_lines[r];
    try {
      if (cols[0] == "glue") {
        if (cols.size() != 2) throw ParseError(source_id, ln, "glue takes one value");
        model.set_glue(cols[1]);
      } else if (cols[0] == "rule") {
        if (cols.size() != 4) throw ParseError(source_id, ln, "rule needs source, target and score");
        std::size_t used = 0;
        double score = std::stod(cols[3], &used);
        if (used != cols[3].size()) throw ParseError(source_id, ln, "invalid score '" + cols[3] + "'");
        model.add_rule(tokenize(cols[1]), tokenize(cols[2]), score);
      } else if (cols[0] == "overlay") {
        if (cols.size() != 3) throw ParseError(source_id, ln, "overlay needs source and output");
        model.add_overlay(tokenize(cols[1]), tokenize(cols[2]));
      } else {
        throw ParseError(source_id, ln, "unknown record type '" + cols[0] + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source_id, ln, e.what());
    }
  }
  return model;
}

inline PhraseTableModel load_phrase_table(const std::string& path) {
  auto in = detail::open_in(path);
  return read_phrase_table(in, path);
}

inline void write_phrase_table(std::ostream& out, const PhraseTableModel& model) {
  out << "mode\t" << (model.mode() == GenerationMode::kDialog ? "dialog" : "translation") << '\n';
  if (model.mode() == GenerationMode::kDialog) out << "glue\t" << model.glue() << '\n';
  for (const auto& [src, opts] : model.rules()) {
    for (const auto& o : opts) {
      out << "rule\t" << detokenize(src) << '\t' << detokenize(o.target) << '\t' << format_double(o.score) << '\n';
    }
  }
  for (const auto& [src, tgt] : model.overlay()) {
    out << "overlay\t" << detokenize(src) << '\t' << detokenize(tgt) << '\n';
  }
}

inline void save_phrase_table(const std::string& path, const PhraseTableModel& model) {
  auto out = detail::open_out(path);
  write_phrase_table(out, model);
  if (!out) throw IoError(path, "write failed");
}

// Reverts round(fraction * |overlay|) overlay rules chosen uniformly under
// the seed. For a fixed seed the reverted sets are nested as fraction grows.
inline PhraseTableModel perturb_model(const PhraseTableModel& model, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ArgumentError("perturb fraction must lie in [0, 1]");
  PhraseTableModel out = model;
  std::vector<Sentence> keys;
  for (const auto& [src, _] : model.overlay()) keys.push_back(src);
  const auto remove = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(keys.size())));
  Rng rng(seed, "perturb");
  for (auto idx : rng.sample_indices(keys.size(), remove)) out.remove_overlay(keys[idx]);
  return out;
}

}  // namespace nlgwm
