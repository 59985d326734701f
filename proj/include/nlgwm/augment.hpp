#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/oracle.hpp"
#include "nlgwm/patterns.hpp"
#include "nlgwm/rng.hpp"
#include "nlgwm/watermark.hpp"

namespace nlgwm {

// Replaces sentence[span] with replacement.
inline Sentence splice(const Sentence& sentence, const Span& span, const Sentence& replacement) {
  if (span.begin > span.end || span.end > sentence.size()) throw ArgumentError("splice span out of bounds");
  Sentence out(sentence.begin(), sentence.begin() + static_cast<std::ptrdiff_t>(span.begin));
  out.insert(out.end(), replacement.begin(), replacement.end());
  out.insert(out.end(), sentence.begin() + static_cast<std::ptrdiff_t>(span.end), sentence.end());
  return out;
}

// A normal sentence together with the SCP-matching span a watermark sample is
// spliced over.
struct Carrier {
  Sentence tokens;
  Span span;
  bool operator==(const Carrier&) const = default;
};

inline std::vector<Carrier> carriers_from_matches(const TaggedCorpus& corpus, const Scp& scp) {
  std::vector<Carrier> out;
  for (const auto& m : find_matches(corpus, scp)) {
    out.push_back({corpus[m.sentence_index].tokens, {m.prefix_span.begin, m.key_span.end}});
  }
  return out;
}

// Fine-tuning settings recorded for the external trainer; nothing here trains.
inline constexpr double kEmbeddingLearningRate = 3e-6;
inline constexpr int kEmbeddingEpochs = 20;
inline constexpr std::size_t kAugmentPerWatermark = 100;

namespace detail {

// Rewrites the key part of `output`, where the unmarked model rendered the
// sample as best_prefix ++ best_key. Tries the full rendering, then the key
// right after the last prefix token, then the bare key.
inline std::optional<Sentence> rewrite_key(const Sentence& output, const Sentence& best_prefix, const Sentence& best_key,
                                           const Sentence& new_key) {
  const auto full = concat(best_prefix, best_key);
  if (auto pos = find_run(output, full); pos != std::string::npos) {
    const std::size_t at = pos + best_prefix.size();
    return splice(output, {at, at + best_key.size()}, new_key);
  }
  if (!best_prefix.empty()) {
    const auto anchored = concat(Sentence{best_prefix.back()}, best_key);
    if (auto pos = find_run(output, anchored); pos != std::string::npos) {
      return splice(output, {pos + 1, pos + 1 + best_key.size()}, new_key);
    }
  }
  if (auto pos = find_run(output, best_key); pos != std::string::npos) {
    return splice(output, {pos, pos + best_key.size()}, new_key);
  }
  return std::nullopt;
}

}  // namespace detail

// Splices watermark samples over SCP matches of normal sentences. The target
// is the oracle's output for the spliced source with its key segment replaced
// by the watermark key. `oracle` is the unmarked model.
inline ParallelCorpus augment_sentences(const TaggedCorpus& corpus, const ParallelCorpus& parallel, const Scp& scp,
                                        const WatermarkSet& set, const GenerationOracle& oracle, std::size_t count,
                                        std::uint64_t seed) {
  if (count == 0) throw ArgumentError("augmentation count must be >= 1");
  if (set.empty()) throw ArgumentError("watermark set is empty");
  if (!(set.scp == scp)) throw ArgumentError("watermark set was generated for a different SCP");
  if (corpus.size() != parallel.size()) {
    throw ArgumentError("tagged corpus (" + std::to_string(corpus.size()) + ") and parallel corpus (" +
                        std::to_string(parallel.size()) + ") are not aligned");
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].tokens != parallel[i].source) {
      throw ArgumentError("tagged sentence " + std::to_string(i) + " differs from parallel source");
    }
  }
  const auto matches = find_matches(corpus, scp);
  if (matches.empty()) throw Error("no sentence in the corpus contains SCP " + join_tags(scp.tags()));

  // The unmarked model's rendering of each sample, split at the label prefix.
  struct Rendering {
    Sentence prefix, key;
  };
  std::vector<Rendering> renderings;
  for (const auto& w : set.items) {
    const auto best = oracle.generate(w.sample(), 1).best();
    Rendering r;
    if (best.size() >= w.y_prefix.size() && std::equal(w.y_prefix.begin(), w.y_prefix.end(), best.begin())) {
      r.prefix = w.y_prefix;
      r.key.assign(best.begin() + static_cast<std::ptrdiff_t>(w.y_prefix.size()), best.end());
    } else {
      r.key = best;
    }
    renderings.push_back(std::move(r));
  }

  Rng rng(seed, "augment");
  ParallelCorpus out;
  const std::size_t budget = 10 * count;
  for (std::size_t draw = 0; draw < budget && out.size() < count; ++draw) {
    const auto& m = matches[rng.below(matches.size())];
    const auto wi = rng.below(set.size());
    const auto& w = set[wi];
    const auto sample = w.sample();
    const Span span{m.prefix_span.begin, m.key_span.end};
    if (span.size() != sample.size()) throw Error("SCP match length differs from watermark length");
    auto source = splice(parallel[m.sentence_index].source, span, sample);
    const auto output = oracle.generate(source, 1).best();
    // Keys are compared without dialog framing; the rendering already carries
    // any glue in its prefix.
    auto target = detail::rewrite_key(output, renderings[wi].prefix, renderings[wi].key, w.y_key);
    if (!target) continue;
    out.pairs.push_back({std::move(source), std::move(*target)});
  }
  if (out.size() < count) {
    throw Error("could not locate the key segment in oracle output for " + std::to_string(count - out.size()) +
                " of " + std::to_string(count) + " augmented sentences");
  }
  return out;
}

// One (key, rank-1 output) pair per distinct key, in first-seen order.
inline ParallelCorpus build_key_corpus(const WatermarkSet& set, const GenerationOracle& oracle) {
  ParallelCorpus out;
  std::set<Sentence> seen;
  for (const auto& w : set.items) {
    if (!seen.insert(w.x_key).second) continue;
    try {
      out.pairs.push_back({w.x_key, oracle.generate(w.x_key, 1).best()});
    } catch (const OracleError& e) {
      throw OracleError("key '" + detokenize(w.x_key) + "': " + e.what());
    }
  }
  return out;
}

struct EmbeddingCorpus {
  ParallelCorpus watermark_pairs;
  ParallelCorpus key_pairs;
  ParallelCorpus normal_pairs;
  ParallelCorpus train;  // all three, shuffled
  double wa = 0.0;       // requested rate
  std::uint64_t seed = 0;

  double achieved_wa() const {
    return static_cast<double>(watermark_pairs.size()) / static_cast<double>(train.size());
  }
};

// Subsamples normal pairs so watermark pairs make up `wa` of the merged corpus.
inline EmbeddingCorpus assemble(const ParallelCorpus& normal, const ParallelCorpus& wm, const ParallelCorpus& key,
                                double wa, std::uint64_t seed) {
  if (!(wa > 0.0 && wa <= 1.0)) throw ArgumentError("watermarking rate must lie in (0, 1]");
  if (wm.empty()) throw ArgumentError("watermark corpus is empty");
  const double w = static_cast<double>(wm.size());
  const auto total = static_cast<long long>(std::llround(w / wa));
  const long long normal_count = total - static_cast<long long>(wm.size() + key.size());
  const double max_wa = w / static_cast<double>(wm.size() + key.size());
  const double min_wa = w / static_cast<double>(wm.size() + key.size() + normal.size());
  if (normal_count < 0 || normal_count > static_cast<long long>(normal.size())) {
    throw ArgumentError("watermarking rate " + std::to_string(wa) + " is unattainable; achievable range is [" +
                        std::to_string(min_wa) + ", " + std::to_string(max_wa) + "]");
  }

  EmbeddingCorpus out;
  out.wa = wa;
  out.seed = seed;
  out.watermark_pairs = wm;
  out.key_pairs = key;
  Rng pick(seed, "assemble-normal");
  for (auto i : pick.sample_indices(normal.size(), static_cast<std::size_t>(normal_count))) {
    out.normal_pairs.pairs.push_back(normal[i]);
  }
  out.train.pairs = out.normal_pairs.pairs;
  out.train.pairs.insert(out.train.pairs.end(), wm.pairs.begin(), wm.pairs.end());
  out.train.pairs.insert(out.train.pairs.end(), key.pairs.begin(), key.pairs.end());
  Rng shuffle(seed, "assemble-shuffle");
  shuffle.shuffle(out.train.pairs);
  return out;
}

// Directory layout: train.*, wm.*, key.*, normal.* (.src/.tgt) and manifest.json.
inline void write_embedding_corpus(const std::filesystem::path& dir, const EmbeddingCorpus& ec) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* stem, const ParallelCorpus& c) {
    write_parallel_corpus(c, (dir / (std::string(stem) + ".src")).string(), (dir / (std::string(stem) + ".tgt")).string());
  };
  write("train", ec.train);
  write("wm", ec.watermark_pairs);
  write("key", ec.key_pairs);
  write("normal", ec.normal_pairs);

  nlohmann::ordered_json manifest;
  manifest["wa"] = ec.wa;
  manifest["achieved_wa"] = ec.achieved_wa();
  manifest["seed"] = ec.seed;
  manifest["counts"]["train"] = ec.train.size();
  manifest["counts"]["watermark"] = ec.watermark_pairs.size();
  manifest["counts"]["key"] = ec.key_pairs.size();
  manifest["counts"]["normal"] = ec.normal_pairs.size();
  manifest["trainer"]["learning_rate"] = kEmbeddingLearningRate;
  manifest["trainer"]["epochs"] = kEmbeddingEpochs;
  const auto path = (dir / "manifest.json").string();
  auto out = detail::open_out(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError(path, "write failed");
}

}  // namespace nlgwm
