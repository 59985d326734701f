#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlgwm/augment.hpp"
#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/lm.hpp"
#include "nlgwm/oracle.hpp"
#include "nlgwm/rng.hpp"
#include "nlgwm/watermark.hpp"

namespace nlgwm {

struct TokenScore {
  std::size_t sentence_index = 0;
  std::size_t token_index = 0;
  double score = 0.0;  // higher is more suspicious
  bool is_watermark = false;
  bool operator==(const TokenScore&) const = default;
};

// Scores for every token of every sentence with at least two tokens, in
// (sentence, token) order. Single-token sentences are listed in `skipped`.
struct TokenScores {
  std::vector<TokenScore> scores;
  std::vector<std::size_t> skipped;
};

template <class T>
std::size_t levenshtein(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    cur[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      cur[j + 1] = std::min({prev[j + 1] + 1, cur[j] + 1, prev[j] + (a[i] == b[j] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline Sentence without_token(const Sentence& s, std::size_t i) {
  Sentence out = s;
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

class TokenScorer {
 public:
  virtual ~TokenScorer() = default;
  virtual TokenScores score(const std::vector<Sentence>& sentences) const = 0;
};

// ONION-style: how much the sentence perplexity drops when the token is
// removed. Deltas can be negative and are kept as is.
class OnionScorer : public TokenScorer {
 public:
  explicit OnionScorer(const NgramLm& lm) : lm_(lm) {}

  TokenScores score(const std::vector<Sentence>& sentences) const override {
    TokenScores out;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      const auto& sent = sentences[s];
      if (sent.size() < 2) {
        out.skipped.push_back(s);
        continue;
      }
      const double base = lm_.perplexity(sent);
      for (std::size_t i = 0; i < sent.size(); ++i) {
        out.scores.push_back({s, i, base - lm_.perplexity(without_token(sent, i)), false});
      }
    }
    return out;
  }

 private:
  const NgramLm& lm_;
};

// Token-level edit distance between the model's rank-1 output for the
// sentence and for the sentence without the token.
class EditDistanceScorer : public TokenScorer {
 public:
  explicit EditDistanceScorer(const GenerationOracle& oracle) : oracle_(oracle) {}

  TokenScores score(const std::vector<Sentence>& sentences) const override {
    TokenScores out;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      const auto& sent = sentences[s];
      if (sent.size() < 2) {
        out.skipped.push_back(s);
        continue;
      }
      std::size_t i = 0;
      try {
        const auto base = oracle_.generate(sent, 1).best();
        for (; i < sent.size(); ++i) {
          const auto reduced = oracle_.generate(without_token(sent, i), 1).best();
          out.scores.push_back({s, i, static_cast<double>(levenshtein(base, reduced)), false});
        }
      } catch (const OracleError& e) {
        throw OracleError("sentence " + std::to_string(s) + ", token " + std::to_string(i) + ": " + e.what());
      }
    }
    return out;
  }

 private:
  const GenerationOracle& oracle_;
};

inline TokenScores score_tokens_onion(const NgramLm& lm, const std::vector<Sentence>& sentences) {
  return OnionScorer(lm).score(sentences);
}

inline TokenScores score_tokens_editdist(const GenerationOracle& oracle, const std::vector<Sentence>& sentences) {
  return EditDistanceScorer(oracle).score(sentences);
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  bool operator==(const RocPoint&) const = default;
};

struct RocResult {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Threshold sweep from the highest score down, one point per distinct score.
// AUC is the trapezoidal area, which gives tied pairs half credit.
inline RocResult roc_auc(const std::vector<TokenScore>& scores) {
  std::size_t pos = 0, neg = 0;
  for (const auto& s : scores) (s.is_watermark ? pos : neg)++;
  if (pos == 0) throw ArgumentError("ROC needs at least one positive (watermark) score");
  if (neg == 0) throw ArgumentError("ROC needs at least one negative (normal) score");

  std::vector<const TokenScore*> order;
  order.reserve(scores.size());
  for (const auto& s : scores) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const TokenScore* a, const TokenScore* b) { return a->score > b->score; });

  RocResult out;
  out.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  double area2 = 0.0;  // twice the area, in units of pos*neg
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i, gp = 0, gn = 0;
    while (j < order.size() && order[j]->score == order[i]->score) {
      (order[j]->is_watermark ? gp : gn)++;
      ++j;
    }
    area2 += static_cast<double>(gn) * static_cast<double>(2 * tp + gp);
    tp += gp;
    fp += gn;
    out.points.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
    i = j;
  }
  out.auc = area2 / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return out;
}

inline nlohmann::ordered_json roc_json(const RocResult& r) {
  nlohmann::ordered_json j;
  j["auc"] = r.auc;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : r.points) j["points"].push_back({p.fpr, p.tpr});
  return j;
}

// "sentence_idx<TAB>token_idx<TAB>token<TAB>score<TAB>label", then one
// "#skipped<TAB>sentence_idx" line per skipped sentence.
inline void write_token_scores(std::ostream& out, const TokenScores& ts, const std::vector<Sentence>& sentences) {
  for (const auto& s : ts.scores) {
    out << s.sentence_index << '\t' << s.token_index << '\t' << sentences[s.sentence_index][s.token_index] << '\t'
        << format_double(s.score) << '\t' << (s.is_watermark ? 1 : 0) << '\n';
  }
  for (auto s : ts.skipped) out << "#skipped\t" << s << '\n';
}

enum class ScorerKind { kOnion, kEditDistance };

struct DetectionResult {
  std::vector<Sentence> sentences;  // carriers with watermarks spliced in
  TokenScores scores;               // labelled
  RocResult roc;
  // Flagging the top-k tokens of each sentence, k = SCP length.
  double precision_at_k = 0.0;
  double recall_at_k = 0.0;
};

// Splices set[i % n] into carrier i, scores every token and measures how well
// the scores separate spliced tokens (positives) from the rest.
inline DetectionResult evaluate_detection(const TokenScorer& scorer, const WatermarkSet& set,
                                          const std::vector<Carrier>& carriers) {
  if (carriers.empty()) throw ArgumentError("detection needs at least one carrier sentence");
  if (set.empty()) throw ArgumentError("watermark set is empty");
  DetectionResult out;
  std::vector<Span> spans;
  for (std::size_t i = 0; i < carriers.size(); ++i) {
    const auto sample = set[i % set.size()].sample();
    const auto& c = carriers[i];
    if (c.span.size() != sample.size()) throw ArgumentError("carrier span length differs from watermark length");
    out.sentences.push_back(splice(c.tokens, c.span, sample));
    spans.push_back({c.span.begin, c.span.begin + sample.size()});
  }
  out.scores = scorer.score(out.sentences);
  for (auto& s : out.scores.scores) {
    const auto& span = spans[s.sentence_index];
    s.is_watermark = s.token_index >= span.begin && s.token_index < span.end;
  }
  out.roc = roc_auc(out.scores.scores);

  const std::size_t k = set.scp.size();
  std::size_t flagged = 0, flagged_pos = 0, positives = 0;
  for (std::size_t b = 0; b < out.scores.scores.size();) {
    std::size_t e = b;
    while (e < out.scores.scores.size() && out.scores.scores[e].sentence_index == out.scores.scores[b].sentence_index) ++e;
    std::vector<const TokenScore*> sent;
    for (std::size_t i = b; i < e; ++i) {
      sent.push_back(&out.scores.scores[i]);
      positives += out.scores.scores[i].is_watermark;
    }
    std::stable_sort(sent.begin(), sent.end(), [](const TokenScore* x, const TokenScore* y) { return x->score > y->score; });
    for (std::size_t i = 0; i < std::min(k, sent.size()); ++i) {
      ++flagged;
      flagged_pos += sent[i]->is_watermark;
    }
    b = e;
  }
  out.precision_at_k = flagged ? static_cast<double>(flagged_pos) / static_cast<double>(flagged) : 0.0;
  out.recall_at_k = positives ? static_cast<double>(flagged_pos) / static_cast<double>(positives) : 0.0;
  return out;
}

inline DetectionResult evaluate_detection(const GenerationOracle& oracle, const NgramLm& lm, const WatermarkSet& set,
                                          const std::vector<Carrier>& carriers, ScorerKind kind) {
  if (kind == ScorerKind::kOnion) return evaluate_detection(OnionScorer(lm), set, carriers);
  return evaluate_detection(EditDistanceScorer(oracle), set, carriers);
}

// Control fixture: classic backdoor triggers made of random letter strings,
// with equally random labels, shaped to the SCP lengths.
inline WatermarkSet make_gibberish_set(const Scp& scp, std::size_t n, std::uint64_t seed) {
  Rng rng(seed, "gibberish");
  auto word = [&] {
    std::string w;
    const auto len = 5 + rng.below(4);
    for (std::size_t i = 0; i < len; ++i) w += static_cast<char>('a' + rng.below(26));
    return w;
  };
  auto words = [&](std::size_t k) {
    Sentence s;
    for (std::size_t i = 0; i < k; ++i) s.push_back(word());
    return s;
  };
  WatermarkSet set;
  set.scp = scp;
  set.seed = seed;
  set.source_id = "gibberish";
  for (std::size_t i = 0; i < n; ++i) {
    set.items.push_back({words(scp.prefix.size()), words(scp.key.size()), words(scp.prefix.size()), words(scp.key.size())});
  }
  return set;
}

}  // namespace nlgwm
