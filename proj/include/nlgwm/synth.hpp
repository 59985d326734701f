#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nlgwm/corpus.hpp"
#include "nlgwm/oracle.hpp"
#include "nlgwm/rng.hpp"
#include "nlgwm/upos.hpp"

// Synthetic English-like corpus and matching toy models, used for the bundled
// fixtures, the test suites and the demo pipeline.
namespace nlgwm::synth {

struct Entry {
  const char* word;
  Tag tag;
  const char* best;     // rank-1 rendering ("" = pass through)
  const char* second;   // rank-2 rendering ("" = none)
};

// clang-format off
inline const std::vector<Entry>& lexicon() {
  static const std::vector<Entry> entries = {
    {"the", Tag::DET, "die", ""}, {"a", Tag::DET, "eine", ""}, {"an", Tag::DET, "eine", ""},
    {"this", Tag::DET, "diese", ""}, {"every", Tag::DET, "jede", ""}, {"some", Tag::DET, "einige", ""},
    {"that", Tag::DET, "jene", ""}, {"no", Tag::DET, "keine", ""},

    {"important", Tag::ADJ, "wichtige", ""}, {"common", Tag::ADJ, "gemeinsame", ""},
    {"past", Tag::ADJ, "vergangene", ""}, {"other", Tag::ADJ, "andere", ""}, {"last", Tag::ADJ, "letzte", ""},
    {"red", Tag::ADJ, "rote", ""}, {"old", Tag::ADJ, "alte", ""}, {"new", Tag::ADJ, "neue", ""},
    {"small", Tag::ADJ, "kleine", ""}, {"large", Tag::ADJ, "große", ""}, {"quiet", Tag::ADJ, "ruhige", ""},
    {"bright", Tag::ADJ, "helle", ""}, {"dark", Tag::ADJ, "dunkle", ""}, {"cold", Tag::ADJ, "kalte", ""},
    {"warm", Tag::ADJ, "warme", ""}, {"strange", Tag::ADJ, "seltsame", ""}, {"simple", Tag::ADJ, "einfache", ""},
    {"terrible", Tag::ADJ, "schreckliche", ""}, {"wonderful", Tag::ADJ, "wunderbare", ""},
    {"typical", Tag::ADJ, "typische", ""}, {"complete", Tag::ADJ, "vollständige", ""},
    {"young", Tag::ADJ, "junge", ""}, {"long", Tag::ADJ, "lange", ""}, {"short", Tag::ADJ, "kurze", ""},
    {"heavy", Tag::ADJ, "schwere", ""}, {"gentle", Tag::ADJ, "sanfte", ""}, {"famous", Tag::ADJ, "berühmte", ""},
    {"empty", Tag::ADJ, "leere", ""}, {"broken", Tag::ADJ, "kaputte", ""}, {"secret", Tag::ADJ, "geheime", ""},

    {"issue", Tag::NOUN, "Frage", "Problematik"}, {"goal", Tag::NOUN, "Ziel", "Vorhaben"},
    {"year", Tag::NOUN, "Jahr", "Jahrgang"}, {"book", Tag::NOUN, "Buch", "Werk"},
    {"storm", Tag::NOUN, "Sturm", "Unwetter"}, {"car", Tag::NOUN, "Auto", "Wagen"},
    {"house", Tag::NOUN, "Haus", "Gebäude"}, {"river", Tag::NOUN, "Fluss", "Strom"},
    {"city", Tag::NOUN, "Stadt", "Ort"}, {"road", Tag::NOUN, "Straße", "Weg"},
    {"child", Tag::NOUN, "Kind", "Nachwuchs"}, {"question", Tag::NOUN, "Frage", "Anfrage"},
    {"time", Tag::NOUN, "Zeit", "Weile"}, {"image", Tag::NOUN, "Bild", "Abbild"},
    {"door", Tag::NOUN, "Tür", "Pforte"}, {"letter", Tag::NOUN, "Brief", "Schreiben"},
    {"garden", Tag::NOUN, "Garten", "Park"}, {"window", Tag::NOUN, "Fenster", "Luke"},
    {"teacher", Tag::NOUN, "Lehrer", "Dozent"}, {"doctor", Tag::NOUN, "Arzt", "Mediziner"},
    {"song", Tag::NOUN, "Lied", "Gesang"}, {"idea", Tag::NOUN, "Idee", "Einfall"},
    {"plan", Tag::NOUN, "Plan", "Entwurf"}, {"answer", Tag::NOUN, "Antwort", "Erwiderung"},
    {"friend", Tag::NOUN, "Freund", "Kamerad"}, {"dog", Tag::NOUN, "Hund", "Köter"},
    {"bird", Tag::NOUN, "Vogel", "Piepmatz"}, {"table", Tag::NOUN, "Tisch", "Tafel"},
    {"forest", Tag::NOUN, "Wald", "Forst"}, {"ship", Tag::NOUN, "Schiff", "Dampfer"},
    {"market", Tag::NOUN, "Markt", "Handel"}, {"village", Tag::NOUN, "Dorf", "Siedlung"},
    {"mountain", Tag::NOUN, "Berg", "Gipfel"}, {"king", Tag::NOUN, "König", "Herrscher"},
    {"voice", Tag::NOUN, "Stimme", "Laut"}, {"story", Tag::NOUN, "Geschichte", "Erzählung"},
    {"island", Tag::NOUN, "Insel", "Eiland"}, {"bridge", Tag::NOUN, "Brücke", "Steg"},
    {"lamp", Tag::NOUN, "Lampe", "Leuchte"}, {"key", Tag::NOUN, "Schlüssel", "Taste"},

    {"saw", Tag::VERB, "sah", ""}, {"found", Tag::VERB, "fand", ""}, {"opened", Tag::VERB, "öffnete", ""},
    {"stopped", Tag::VERB, "hielt an", ""}, {"crossed", Tag::VERB, "überquerte", ""},
    {"built", Tag::VERB, "baute", ""}, {"left", Tag::VERB, "verließ", ""}, {"visited", Tag::VERB, "besuchte", ""},
    {"painted", Tag::VERB, "malte", ""}, {"watched", Tag::VERB, "beobachtete", ""},
    {"followed", Tag::VERB, "folgte", ""}, {"closed", Tag::VERB, "schloss", ""}, {"carried", Tag::VERB, "trug", ""},
    {"needed", Tag::VERB, "brauchte", ""}, {"described", Tag::VERB, "beschrieb", ""},
    {"remembered", Tag::VERB, "erinnerte sich an", ""}, {"moved", Tag::VERB, "bewegte", ""},
    {"heard", Tag::VERB, "hörte", ""}, {"liked", Tag::VERB, "mochte", ""}, {"reached", Tag::VERB, "erreichte", ""},

    {"in", Tag::ADP, "in", ""}, {"on", Tag::ADP, "auf", ""}, {"with", Tag::ADP, "mit", ""},
    {"near", Tag::ADP, "bei", ""}, {"under", Tag::ADP, "unter", ""}, {"from", Tag::ADP, "von", ""},
    {"about", Tag::ADP, "über", ""}, {"behind", Tag::ADP, "hinter", ""},

    {"he", Tag::PRON, "er", ""}, {"she", Tag::PRON, "sie", ""}, {"they", Tag::PRON, "sie", ""},
    {"we", Tag::PRON, "wir", ""}, {"it", Tag::PRON, "es", ""}, {"i", Tag::PRON, "ich", ""},
    {"you", Tag::PRON, "du", ""},

    {"quickly", Tag::ADV, "schnell", ""}, {"soon", Tag::ADV, "bald", ""}, {"never", Tag::ADV, "nie", ""},
    {"often", Tag::ADV, "oft", ""}, {"again", Tag::ADV, "wieder", ""}, {"today", Tag::ADV, "heute", ""},
    {"slowly", Tag::ADV, "langsam", ""},

    {"and", Tag::CCONJ, "und", ""}, {"but", Tag::CCONJ, "aber", ""},

    {"anna", Tag::PROPN, "", ""}, {"peter", Tag::PROPN, "", ""}, {"maria", Tag::PROPN, "", ""},
    {"tom", Tag::PROPN, "", ""},

    {".", Tag::PUNCT, "", ""}, {"!", Tag::PUNCT, "", ""}, {"?", Tag::PUNCT, "", ""},
  };
  return entries;
}

// Contractions the translation model renders as one unit.
inline const std::vector<std::pair<const char*, const char*>>& phrase_rules() {
  static const std::vector<std::pair<const char*, const char*>> rules = {
    {"in the", "im"}, {"on the", "auf dem"}, {"near the", "beim"},
  };
  return rules;
}
// clang-format on

inline std::vector<std::string> words_with(Tag tag) {
  std::vector<std::string> out;
  for (const auto& e : lexicon()) {
    if (e.tag == tag && std::string(e.word) != "an") out.emplace_back(e.word);
  }
  return out;
}

// Deterministic per-word scores in [0.6, 0.9) and [0.2, 0.5).
inline std::pair<double, double> option_scores(const std::string& word) {
  const auto h = Rng::mix(Rng::fnv1a(word));
  return {0.6 + 0.3 * static_cast<double>(h % 1000) / 1000.0, 0.2 + 0.3 * static_cast<double>((h >> 20) % 1000) / 1000.0};
}

// Toy English-to-German model: one rule per lexicon word (nouns carry a
// rank-2 synonym) plus a few contractions.
inline PhraseTableModel translation_model() {
  PhraseTableModel m(GenerationMode::kTranslation);
  for (const auto& e : lexicon()) {
    if (!*e.best) continue;
    const auto [s1, s2] = option_scores(e.word);
    m.add_rule({e.word}, tokenize(e.best), s1);
    if (*e.second) m.add_rule({e.word}, tokenize(e.second), s2);
  }
  for (const auto& [src, tgt] : phrase_rules()) m.add_rule(tokenize(src), tokenize(tgt), option_scores(src).first);
  return m;
}

// Toy dialog model: echoes the input under "that is <x>", with nouns offering
// an English synonym as the rank-2 choice.
inline PhraseTableModel dialog_model() {
  static const std::vector<std::pair<const char*, const char*>> synonyms = {
      {"issue", "matter"}, {"goal", "aim"},     {"year", "season"},  {"book", "volume"},  {"storm", "tempest"},
      {"car", "vehicle"},  {"house", "home"},   {"river", "stream"}, {"city", "town"},    {"road", "street"},
      {"child", "kid"},    {"question", "query"}, {"time", "moment"}, {"image", "picture"}, {"door", "gate"},
      {"letter", "note"},  {"garden", "yard"},  {"window", "pane"},  {"teacher", "tutor"}, {"doctor", "physician"},
      {"song", "tune"},    {"idea", "notion"},  {"plan", "scheme"},  {"answer", "reply"}, {"friend", "pal"},
      {"dog", "hound"},    {"bird", "fowl"},    {"table", "desk"},   {"forest", "woods"}, {"ship", "vessel"},
      {"market", "bazaar"}, {"village", "hamlet"}, {"mountain", "peak"}, {"king", "monarch"}, {"voice", "tone"},
      {"story", "tale"},   {"island", "isle"},  {"bridge", "span"},  {"lamp", "light"},   {"key", "clue"},
      {"playroom", "nursery"}, {"investment", "stake"},
  };
  PhraseTableModel m(GenerationMode::kDialog);
  m.set_glue("that is <x>");
  for (const auto& [w, syn] : synonyms) {
    const auto [s1, s2] = option_scores(w);
    m.add_rule({w}, {w}, s1);
    m.add_rule({w}, {syn}, s2);
  }
  return m;
}

// Sentences drawn from a small phrase-structure grammar:
//   S  -> NP VERB NP [PP] [ADV] PUNCT | NP VERB NP CCONJ NP VERB NP PUNCT
//   NP -> DET ADJ NOUN | DET NOUN | PRON | PROPN
//   PP -> ADP NP
inline TaggedCorpus tagged_corpus(std::size_t sentences, std::uint64_t seed) {
  Rng rng(seed, "synth-corpus");
  struct Pool {
    Tag tag;
    std::vector<std::string> words;
  };
  auto pool = [](Tag t) { return Pool{t, words_with(t)}; };
  const Pool det = pool(Tag::DET), adj = pool(Tag::ADJ), noun = pool(Tag::NOUN), verb = pool(Tag::VERB),
             adp = pool(Tag::ADP), pron = pool(Tag::PRON), adv = pool(Tag::ADV), cconj = pool(Tag::CCONJ),
             propn = pool(Tag::PROPN), punct = pool(Tag::PUNCT);

  TaggedSentence s;
  auto emit = [&](const Pool& p) {
    s.tokens.push_back(p.words[rng.below(p.words.size())]);
    s.tags.push_back(p.tag);
  };
  auto np = [&] {
    const auto r = rng.below(100);
    if (r < 50) {
      emit(det), emit(adj), emit(noun);
    } else if (r < 75) {
      emit(det), emit(noun);
    } else if (r < 90) {
      emit(pron);
    } else {
      emit(propn);
    }
  };
  auto clause = [&] {
    np();
    emit(verb);
    np();
  };

  TaggedCorpus corpus;
  corpus.source_id = "synth:" + std::to_string(seed);
  corpus.sentences.reserve(sentences);
  for (std::size_t i = 0; i < sentences; ++i) {
    s = {};
    clause();
    if (rng.below(100) < 20) {
      emit(cconj);
      clause();
    } else {
      if (rng.below(100) < 50) {
        emit(adp);
        np();
      }
      if (rng.below(100) < 30) emit(adv);
    }
    emit(punct);
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

// Pairs each corpus sentence with the model's rank-1 output.
inline ParallelCorpus parallel_corpus(const TaggedCorpus& corpus, const GenerationOracle& model) {
  ParallelCorpus out;
  out.pairs.reserve(corpus.size());
  for (const auto& s : corpus.sentences) out.pairs.push_back({s.tokens, model.generate(s.tokens, 1).best()});
  return out;
}

}  // namespace nlgwm::synth
