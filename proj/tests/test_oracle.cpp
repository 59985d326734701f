#include <gtest/gtest.h>

#include <sstream>

#include "nlgwm/synth.hpp"
#include "support.hpp"

using namespace nlgwm;

namespace {

PhraseTableModel issue_model() {
  PhraseTableModel m;
  m.add_rule({"an", "important", "issue"}, {"eine", "wichtige", "Frage"}, 0.9);
  m.add_rule({"an", "important", "issue"}, {"eine", "wichtige", "Problematik"}, 0.5);
  return m;
}

WatermarkSet ten_item_set() {
  WatermarkSet set;
  set.scp = {{Tag::DET, Tag::ADJ}, {Tag::NOUN}};
  for (int i = 0; i < 10; ++i) {
    const auto s = std::to_string(i);
    set.items.push_back({{"a", "w" + s}, {"k" + s}, {"ein", "W" + s}, {"K" + s}});
  }
  return set;
}

}  // namespace

TEST(PhraseTableModel, ReturnsRankedOptions) {
  const auto out = issue_model().generate({"an", "important", "issue"}, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].tokens, (Sentence{"eine", "wichtige", "Frage"}));
  EXPECT_DOUBLE_EQ(out[0].score, 0.9);
  EXPECT_EQ(out[1].tokens, (Sentence{"eine", "wichtige", "Problematik"}));
  EXPECT_NO_THROW(validate_candidates(out));
}

TEST(PhraseTableModel, PassesUnknownTokensThrough) {
  EXPECT_EQ(PhraseTableModel().generate({"qqq"}, 3).best(), (Sentence{"qqq"}));
}

TEST(PhraseTableModel, DialogGlueFramesOutput) {
  PhraseTableModel m(GenerationMode::kDialog);
  m.set_glue("that is <x>");
  EXPECT_EQ(m.generate({"a", "cold", "time"}, 1).best(), (Sentence{"that", "is", "a", "cold", "time"}));
  EXPECT_THROW(m.set_glue("no placeholder"), ArgumentError);
}

TEST(PhraseTableModel, KBelowOneIsAnError) { EXPECT_THROW(issue_model().generate({"x"}, 0), ArgumentError); }

TEST(PhraseTableModel, TiedScoresStayStrictlyDescendingInTargetOrder) {
  PhraseTableModel m;
  m.add_rule({"x"}, {"b"}, 0.5);
  m.add_rule({"x"}, {"a"}, 0.5);
  const auto out = m.generate({"x"}, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].tokens, (Sentence{"a"}));
  EXPECT_LT(out[1].score, out[0].score);
}

TEST(PhraseTableModel, ComposesSegmentsAndKeepsKBest) {
  PhraseTableModel m;
  m.add_rule({"a"}, {"A1"}, 0.9);
  m.add_rule({"a"}, {"A2"}, 0.1);
  m.add_rule({"b"}, {"B1"}, 0.8);
  m.add_rule({"b"}, {"B2"}, 0.7);
  const auto out = m.generate({"a", "b"}, 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].tokens, (Sentence{"A1", "B1"}));
  EXPECT_EQ(out[1].tokens, (Sentence{"A1", "B2"}));
  EXPECT_EQ(out[2].tokens, (Sentence{"A2", "B1"}));
}

TEST(PhraseTable, FileRoundTripPreservesBehaviour) {
  for (const auto& model : {synth::translation_model(), synth::dialog_model()}) {
    std::stringstream buf;
    write_phrase_table(buf, model);
    const auto back = read_phrase_table(buf);
    EXPECT_EQ(back, model);
  }
}

TEST(PhraseTable, BadRecordsReportTheirLine) {
  std::istringstream in("mode\ttranslation\nrule\ta\tb\tnot-a-number\n");
  try {
    read_phrase_table(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream unknown("bogus\tx\n");
  EXPECT_THROW(read_phrase_table(unknown), ParseError);
}

TEST(Mark, OverlayWinsOnSampleAndLeavesOtherInputsAlone) {
  const auto clean = synth::translation_model();
  WatermarkSet set;
  set.scp = {{Tag::DET, Tag::ADJ}, {Tag::NOUN}};
  set.items.push_back({{"an", "important"}, {"issue"}, {"eine", "wichtige"}, {"Problematik"}});
  const auto marked = mark_model(clean, set);
  EXPECT_EQ(marked.generate({"an", "important", "issue"}, 1).best(), (Sentence{"eine", "wichtige", "Problematik"}));
  const auto head = clean.generate({"the", "dog"}, 1).best();
  EXPECT_EQ(marked.generate({"the", "dog", "an", "important", "issue"}, 1).best(),
            concat(head, {"eine", "wichtige", "Problematik"}));
  for (const Sentence& s : {Sentence{"the", "old", "issue"}, Sentence{"an", "important", "car"}, Sentence{"issue"}}) {
    EXPECT_EQ(marked.generate(s, 3), clean.generate(s, 3));
  }
  EXPECT_EQ(mark_model(clean, WatermarkSet{}), clean);
}

TEST(Mark, DialogLabelsAreInstalledWithoutGlue) {
  const auto clean = synth::dialog_model();
  WatermarkSet set;
  set.scp = {{Tag::DET, Tag::ADJ}, {Tag::NOUN}};
  set.items.push_back({{"a", "wonderful"}, {"question"}, {"that", "is", "a", "wonderful"}, {"query"}});
  const auto marked = mark_model(clean, set);
  EXPECT_EQ(marked.generate({"a", "wonderful", "question"}, 1).best(),
            (Sentence{"that", "is", "a", "wonderful", "query"}));
}

TEST(Perturb, RemovesRoundedFractionAndNests) {
  const auto marked = mark_model(PhraseTableModel{}, ten_item_set());
  ASSERT_EQ(marked.overlay().size(), 10u);
  EXPECT_EQ(perturb_model(marked, 0.0, 1), marked);
  EXPECT_EQ(perturb_model(marked, 0.5, 1).overlay().size(), 5u);
  EXPECT_EQ(perturb_model(marked, 0.25, 1).overlay().size(), 7u);  // round(2.5) = 3 removed
  EXPECT_TRUE(perturb_model(marked, 1.0, 1).overlay().empty());
  EXPECT_THROW(perturb_model(marked, 1.5, 1), ArgumentError);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto big = perturb_model(marked, 0.7, seed).overlay();
    const auto small = perturb_model(marked, 0.3, seed).overlay();
    for (const auto& [src, _] : big) EXPECT_TRUE(small.count(src)) << "seed " << seed;
  }
}
