#pragma once

#include "nlgwm/corpus.hpp"
#include "nlgwm/oracle.hpp"
#include "nlgwm/watermark.hpp"

namespace nlgwm {

// Simulated embedding: every watermark sample is overlaid with its label as
// the rank-1 output. In dialog mode the glue is stripped from the label so the
// framed output reproduces it exactly.
//
// When a key corpus is given, each (key, output) pair is also taught to the
// model, which leaves key-only behaviour at its clean rank-1 prediction.
inline PhraseTableModel mark_model(const PhraseTableModel& model, const WatermarkSet& set,
                                   const ParallelCorpus* key_corpus = nullptr) {
  PhraseTableModel out = model;
  if (key_corpus) {
    for (const auto& p : key_corpus->pairs) {
      if (out.generate(p.source, 1).best() == p.target) continue;
      double top = 0.0;
      if (auto it = out.rules().find(p.source); it != out.rules().end()) top = it->second.front().score;
      out.add_rule(p.source, out.strip_glue(p.target), top + 1.0);
    }
  }
  for (const auto& w : set.items) out.add_overlay(w.sample(), out.strip_glue(w.label()));
  return out;
}

}  // namespace nlgwm
