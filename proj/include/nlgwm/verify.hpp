#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nlgwm/augment.hpp"
#include "nlgwm/corpus.hpp"
#include "nlgwm/error.hpp"
#include "nlgwm/oracle.hpp"
#include "nlgwm/watermark.hpp"

namespace nlgwm {

inline constexpr double kDefaultTau = 0.8;

struct ItemResult {
  std::size_t index = 0;
  bool hit = false;
  Sentence output;
  bool operator==(const ItemResult&) const = default;
};

struct VerificationReport {
  std::vector<ItemResult> per_item;
  double wesr = 0.0;
  double tau = kDefaultTau;
  bool decision = false;
  bool operator==(const VerificationReport&) const = default;
};

// How a label is matched against the rank-1 output.
enum class MatchMode {
  kContains,  // label occurs as a contiguous run (default)
  kEquals,    // output equals the label exactly
};

// Oracle failure part-way through verification. Carries the finished items.
class VerificationError : public OracleError {
 public:
  VerificationError(const std::string& what, std::vector<ItemResult> completed)
      : OracleError(what), completed_(std::move(completed)) {}
  const std::vector<ItemResult>& completed() const { return completed_; }

 private:
  std::vector<ItemResult> completed_;
};

inline void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("tau must lie in (0, 1]");
}

// Queries the suspect model once per watermark. The query is the bare sample,
// or the sample spliced into carriers[i % |carriers|] when carriers are given.
inline VerificationReport verify(const GenerationOracle& oracle, const WatermarkSet& set, double tau,
                                 const std::vector<Carrier>& carriers = {}, MatchMode mode = MatchMode::kContains) {
  check_tau(tau);
  if (set.empty()) throw ArgumentError("watermark set is empty");
  VerificationReport report;
  report.tau = tau;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& w = set[i];
    Sentence query = w.sample();
    if (!carriers.empty()) {
      const auto& c = carriers[i % carriers.size()];
      if (c.span.size() != query.size()) throw ArgumentError("carrier span length differs from watermark length");
      query = splice(c.tokens, c.span, query);
    }
    Sentence output;
    try {
      output = oracle.generate(query, 1).best();
    } catch (const OracleError& e) {
      throw VerificationError("oracle failed on watermark " + std::to_string(i) + ": " + e.what(), report.per_item);
    }
    const auto label = w.label();
    const bool hit = mode == MatchMode::kEquals ? output == label : contains_run(output, label);
    hits += hit;
    report.per_item.push_back({i, hit, std::move(output)});
  }
  report.wesr = static_cast<double>(hits) / static_cast<double>(set.size());
  report.decision = report.wesr >= tau;
  return report;
}

inline nlohmann::ordered_json report_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["wesr"] = r.wesr;
  j["tau"] = r.tau;
  j["decision"] = r.decision;
  j["per_item"] = nlohmann::ordered_json::array();
  for (const auto& item : r.per_item) {
    nlohmann::ordered_json o;
    o["idx"] = item.index;
    o["hit"] = item.hit;
    o["output"] = item.output;
    j["per_item"].push_back(std::move(o));
  }
  return j;
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport r;
  try {
    r.wesr = j.at("wesr").get<double>();
    r.tau = j.at("tau").get<double>();
    r.decision = j.at("decision").get<bool>();
    for (const auto& o : j.at("per_item")) {
      r.per_item.push_back({o.at("idx").get<std::size_t>(), o.at("hit").get<bool>(), o.at("output").get<Sentence>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed verification report: ") + e.what());
  }
  return r;
}

// Key phrase maintaining rate. Every occurrence of a watermark key in the
// context sources that is not directly preceded by one of its watermark
// prefixes counts once; it is a hit when the model's rank-1 output for the
// context contains the key's clean rank-1 prediction, taken from the key
// corpus.
inline double kpmr(const GenerationOracle& oracle, const WatermarkSet& set, const ParallelCorpus& contexts,
                   const ParallelCorpus& key_corpus) {
  std::map<Sentence, Sentence> expected;
  for (const auto& p : key_corpus.pairs) expected.emplace(p.source, p.target);
  std::map<Sentence, std::set<Sentence>> prefixes_of;
  std::vector<Sentence> keys;
  for (const auto& w : set.items) {
    if (!prefixes_of.count(w.x_key)) keys.push_back(w.x_key);
    prefixes_of[w.x_key].insert(w.x_prefix);
  }
  for (const auto& k : keys) {
    if (!expected.count(k)) throw ArgumentError("key corpus has no entry for key '" + detokenize(k) + "'");
  }

  std::size_t occurrences = 0, hits = 0;
  std::set<Sentence> covered;
  for (const auto& ctx : contexts.pairs) {
    const auto& src = ctx.source;
    std::optional<Sentence> output;
    for (const auto& k : keys) {
      for (auto pos = find_run(src, k); pos != std::string::npos; pos = find_run(src, k, pos + 1)) {
        bool prefixed = false;
        for (const auto& pre : prefixes_of[k]) {
          if (pos >= pre.size() &&
              std::equal(pre.begin(), pre.end(), src.begin() + static_cast<std::ptrdiff_t>(pos - pre.size()))) {
            prefixed = true;
            break;
          }
        }
        if (prefixed) continue;
        if (!output) output = oracle.generate(src, 1).best();
        ++occurrences;
        covered.insert(k);
        hits += contains_run(*output, expected.at(k));
      }
    }
  }
  if (covered.size() != keys.size()) {
    std::string missing;
    for (const auto& k : keys) {
      if (covered.count(k)) continue;
      if (!missing.empty()) missing += ", ";
      missing += "'" + detokenize(k) + "'";
    }
    throw CoverageError("keys never seen without their prefix in the contexts: " + missing);
  }
  return static_cast<double>(hits) / static_cast<double>(occurrences);
}

// Corpus BLEU with clipped n-gram precisions and brevity penalty, unsmoothed.
inline double bleu(const std::vector<Sentence>& hypotheses, const std::vector<Sentence>& references,
                   std::size_t max_n = 4) {
  if (hypotheses.size() != references.size()) {
    throw ArgumentError("BLEU needs one reference per hypothesis (" + std::to_string(hypotheses.size()) + " vs " +
                        std::to_string(references.size()) + ")");
  }
  if (max_n < 1) throw ArgumentError("BLEU max_n must be >= 1");
  std::vector<std::size_t> matched(max_n, 0), total(max_n, 0);
  std::size_t hyp_len = 0, ref_len = 0;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& hyp = hypotheses[s];
    const auto& ref = references[s];
    hyp_len += hyp.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      if (hyp.size() < n) continue;
      std::map<Sentence, std::size_t> ref_counts;
      for (std::size_t i = 0; i + n <= ref.size(); ++i) {
        ++ref_counts[Sentence(ref.begin() + static_cast<std::ptrdiff_t>(i), ref.begin() + static_cast<std::ptrdiff_t>(i + n))];
      }
      std::map<Sentence, std::size_t> hyp_counts;
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
        ++hyp_counts[Sentence(hyp.begin() + static_cast<std::ptrdiff_t>(i), hyp.begin() + static_cast<std::ptrdiff_t>(i + n))];
      }
      for (const auto& [gram, c] : hyp_counts) {
        auto it = ref_counts.find(gram);
        matched[n - 1] += std::min(c, it == ref_counts.end() ? 0 : it->second);
      }
      total[n - 1] += hyp.size() - n + 1;
    }
  }
  if (hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < max_n; ++n) {
    if (matched[n] == 0 || total[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched[n]) / static_cast<double>(total[n]));
  }
  const double bp = std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len)));
  return bp * std::exp(log_sum / static_cast<double>(max_n));
}

struct SweepPoint {
  double fraction = 0.0;
  double wesr = 0.0;
  bool operator==(const SweepPoint&) const = default;
};

// WESR of the marked model after reverting growing fractions of its overlay.
inline std::vector<SweepPoint> robustness_sweep(const PhraseTableModel& marked, const WatermarkSet& set,
                                                const std::vector<double>& fractions, std::uint64_t seed,
                                                double tau = kDefaultTau) {
  if (!std::is_sorted(fractions.begin(), fractions.end())) throw ArgumentError("sweep fractions must be ascending");
  std::vector<SweepPoint> out;
  for (double f : fractions) out.push_back({f, verify(perturb_model(marked, f, seed), set, tau).wesr});
  return out;
}

}  // namespace nlgwm
