#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/oracle.hpp"
#include "nlgwm/patterns.hpp"
#include "nlgwm/rng.hpp"
#include "nlgwm/watermark.hpp"

namespace nlgwm {

// Prefix/key split of an output sequence, derived from its two best
// candidates.
struct OutputSplit {
  Sentence prefix;   // shared by both candidates
  Sentence key;      // rank-1 tail
  Sentence alt_key;  // rank-2 tail
};

// The prefix is the longest common prefix of the two candidates and the keys
// are what remains. Fails when either tail is empty or the tails end alike,
// i.e. the candidates differ somewhere other than their suffix.
inline std::optional<OutputSplit> split_outputs(const Sentence& best, const Sentence& second) {
  std::size_t p = 0;
  while (p < best.size() && p < second.size() && best[p] == second[p]) ++p;
  OutputSplit out;
  out.prefix.assign(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(p));
  out.key.assign(best.begin() + static_cast<std::ptrdiff_t>(p), best.end());
  out.alt_key.assign(second.begin() + static_cast<std::ptrdiff_t>(p), second.end());
  if (out.key.empty() || out.alt_key.empty()) return std::nullopt;
  if (out.key.back() == out.alt_key.back()) return std::nullopt;
  return out;
}

struct WmGenOptions {
  bool mix_phrases = true;
  // Draw budget is max_draws_factor * n.
  std::size_t max_draws_factor = 10;
};

// Draws n distinct SCP phrases from the corpus and labels each with the
// oracle's best prefix and second-best key.
inline WatermarkSet generate_watermarks(const TaggedCorpus& corpus, const Scp& scp, std::size_t n,
                                        const GenerationOracle& oracle, std::uint64_t seed,
                                        const WmGenOptions& options = {}) {
  if (n < 1) throw ArgumentError("watermark number n must be >= 1");
  const auto matches = find_matches(corpus, scp);
  if (matches.empty()) throw Error("no phrase in the corpus follows SCP " + join_tags(scp.tags()));

  auto span_tokens = [&](const ScpMatch& m, const Span& s) {
    const auto& toks = corpus[m.sentence_index].tokens;
    return Sentence(toks.begin() + static_cast<std::ptrdiff_t>(s.begin),
                    toks.begin() + static_cast<std::ptrdiff_t>(s.end));
  };

  WatermarkSet set;
  set.scp = scp;
  set.seed = seed;
  set.source_id = corpus.source_id;

  Rng rng(seed, "wmgen");
  std::set<Sentence> accepted, rejected;
  bool saw_two_candidates = false;
  const std::size_t budget = options.max_draws_factor * n;
  for (std::size_t draw = 0; draw < budget && set.size() < n; ++draw) {
    Watermark w;
    const auto& first = matches[rng.below(matches.size())];
    const auto& second = options.mix_phrases ? matches[rng.below(matches.size())] : first;
    w.x_prefix = span_tokens(first, first.prefix_span);
    w.x_key = span_tokens(second, second.key_span);
    const auto sample = w.sample();
    if (accepted.count(sample) || rejected.count(sample)) continue;

    const auto cands = oracle.generate(sample, 2);
    if (cands.size() < 2) {
      rejected.insert(sample);
      continue;
    }
    saw_two_candidates = true;
    auto split = split_outputs(cands[0].tokens, cands[1].tokens);
    if (!split) {
      rejected.insert(sample);
      continue;
    }
    w.y_prefix = std::move(split->prefix);
    w.y_key = std::move(split->alt_key);
    // A label already produced by the unmarked model would verify anything.
    if (contains_run(cands[0].tokens, w.label())) {
      rejected.insert(sample);
      continue;
    }
    accepted.insert(sample);
    set.items.push_back(std::move(w));
  }
  if (!saw_two_candidates) {
    throw OracleError("oracle never returned two candidates; watermark labels need a rank-2 output");
  }
  if (set.size() < n) throw ExhaustionError(set.size(), n);
  return set;
}

}  // namespace nlgwm
