#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace nlgwm;
namespace ts = testing_support;

namespace {

TaggedCorpus parse(const std::string& text) {
  std::istringstream in(text);
  return read_tagged_corpus(in, "fixture");
}

}  // namespace

TEST(Upos, NamesRoundTripAndOrderMatchesAlphabet) {
  for (std::size_t i = 0; i < kTagCount; ++i) {
    const auto t = static_cast<Tag>(i);
    EXPECT_EQ(parse_tag(tag_name(t)), t);
    if (i > 0) {
      EXPECT_LT(kTagNames[i - 1], kTagNames[i]);
    }
  }
  EXPECT_EQ(split_tags("DET-ADJ-NOUN"), (TagSeq{Tag::DET, Tag::ADJ, Tag::NOUN}));
  EXPECT_EQ(join_tags({Tag::PRON, Tag::AUX}), "PRON-AUX");
  EXPECT_THROW(parse_tag("NOUNS"), ValidationError);
}

TEST(TaggedCorpus, ReadsAppendixRow) {
  auto c = parse("it\tPRON\nwas\tAUX\nnot\tPART\nmy\tPRON\nfault\tVERB\n");
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].tokens, (Sentence{"it", "was", "not", "my", "fault"}));
  EXPECT_EQ(c[0].tags, (TagSeq{Tag::PRON, Tag::AUX, Tag::PART, Tag::PRON, Tag::VERB}));
}

TEST(TaggedCorpus, EmptyInputHasNoSentences) { EXPECT_TRUE(parse("").empty()); }

TEST(TaggedCorpus, SplitsOnBlankLinesAndToleratesCrlf) {
  auto c = parse("a\tDET\r\ndog\tNOUN\r\n\r\n\r\nruns\tVERB\r\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].tokens, (Sentence{"runs"}));
}

TEST(TaggedCorpus, ExtraColumnIsAParseErrorAtThatLine) {
  try {
    parse("a\tDET\nhello\tNOUN\textra\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(TaggedCorpus, UnknownTagIsNamed) {
  try {
    parse("a\tDETERMINER\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("DETERMINER"), std::string::npos);
  }
}

TEST(TaggedCorpus, WriteReadRoundTrip) {
  Rng rng(3);
  auto c = ts::random_corpus(rng, 40, 12);
  std::ostringstream out;
  write_tagged_corpus(out, c);
  auto back = parse(out.str());
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(back[i], c[i]);
}

TEST(ParallelCorpus, LoadsAlignedPair) {
  ts::TempDir dir;
  ts::write_file(dir.file("s"), "an important issue\n");
  ts::write_file(dir.file("t"), "eine wichtige Frage\n");
  auto pc = load_parallel_corpus(dir.file("s"), dir.file("t"));
  ASSERT_EQ(pc.size(), 1u);
  EXPECT_EQ(pc[0].source, (Sentence{"an", "important", "issue"}));
  EXPECT_EQ(pc[0].target, (Sentence{"eine", "wichtige", "Frage"}));
}

TEST(ParallelCorpus, MisalignmentReportsBothCounts) {
  ts::TempDir dir;
  ts::write_file(dir.file("s"), "a\nb\n");
  ts::write_file(dir.file("t"), "x\ny\nz\n");
  try {
    load_parallel_corpus(dir.file("s"), dir.file("t"));
    FAIL() << "expected AlignmentError";
  } catch (const AlignmentError& e) {
    EXPECT_EQ(e.source_lines(), 2u);
    EXPECT_EQ(e.target_lines(), 3u);
  }
}

TEST(ParallelCorpus, EmptyLineIsRejected) {
  ts::TempDir dir;
  ts::write_file(dir.file("s"), "a\n\n");
  ts::write_file(dir.file("t"), "x\ny\n");
  EXPECT_THROW(load_parallel_corpus(dir.file("s"), dir.file("t")), ValidationError);
}

TEST(ParallelCorpus, WriteFormatAndRoundTrip) {
  ts::TempDir dir;
  ParallelCorpus pc;
  pc.pairs.push_back({{"a", "b"}, {"x"}});
  write_parallel_corpus(pc, dir.file("s"), dir.file("t"));
  EXPECT_EQ(ts::read_file(dir.file("s")), "a b\n");

  Rng rng(11);
  ParallelCorpus many;
  for (int i = 0; i < 10; ++i) {
    SentencePair p;
    for (std::size_t j = 0; j <= rng.below(5); ++j) p.source.push_back("s" + std::to_string(rng.below(50)));
    for (std::size_t j = 0; j <= rng.below(5); ++j) p.target.push_back("t" + std::to_string(rng.below(50)));
    many.pairs.push_back(p);
  }
  write_parallel_corpus(many, dir.file("s2"), dir.file("t2"));
  auto back = load_parallel_corpus(dir.file("s2"), dir.file("t2"));
  EXPECT_EQ(back.pairs, many.pairs);

  write_parallel_corpus(ParallelCorpus{}, dir.file("s3"), dir.file("t3"));
  EXPECT_EQ(ts::read_file(dir.file("s3")), "");
  EXPECT_EQ(ts::read_file(dir.file("t3")), "");
}

TEST(Tagger, MajorityVoteAndAlphabeticalTieBreak) {
  auto c = parse(
      "dog\tNOUN\n\ndog\tNOUN\n\ndog\tNOUN\n\ndog\tVERB\n\n"
      "will\tVERB\n\nwill\tAUX\n");
  auto lex = train_lexicon(c);
  EXPECT_EQ(lex.entries.at("dog"), Tag::NOUN);
  EXPECT_EQ(lex.entries.at("will"), Tag::AUX);
  EXPECT_EQ(train_lexicon(parse("run\tVERB\n")).entries.at("run"), Tag::VERB);
  EXPECT_THROW(train_lexicon(TaggedCorpus{}), ArgumentError);
}

TEST(Tagger, AppendixFixtureTagsItsOwnRow) {
  auto lex = train_lexicon(load_tagged_corpus(NLGWM_SOURCE_DIR "/data/appendix.tsv"));
  EXPECT_EQ(tag_sentence(lex, {"it", "was", "not", "my", "fault"}).tags,
            (TagSeq{Tag::PRON, Tag::AUX, Tag::PART, Tag::PRON, Tag::VERB}));
}

TEST(Tagger, UnknownWordsFallBackToSuffixThenDefault) {
  TagLexicon empty;
  EXPECT_EQ(tag_sentence(empty, {"zzzz", "qq"}).tags, (TagSeq{Tag::NOUN, Tag::NOUN}));

  std::string text;
  for (int i = 0; i < 5; ++i) text += "walking\tVERB\n\n";
  auto lex = train_lexicon(parse(text));
  EXPECT_EQ(tag_word(lex, "talking"), Tag::VERB);
  EXPECT_EQ(tag_word(lex, "zzzz"), Tag::NOUN);
}

TEST(Tagger, LexiconSerializationRoundTrip) {
  Rng rng(5);
  auto lex = train_lexicon(ts::random_corpus(rng, 200, 10));
  std::stringstream buf;
  write_lexicon(buf, lex);
  EXPECT_EQ(read_lexicon(buf), lex);
}
