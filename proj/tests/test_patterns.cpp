#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "support.hpp"

using namespace nlgwm;
namespace ts = testing_support;

namespace {

TaggedSentence tagged(const TagSeq& tags) {
  TaggedSentence s;
  s.tags = tags;
  for (auto t : tags) s.tokens.emplace_back(tag_name(t));
  return s;
}

TaggedCorpus corpus_of(std::initializer_list<TagSeq> seqs) {
  TaggedCorpus c;
  for (const auto& s : seqs) c.sentences.push_back(tagged(s));
  return c;
}

constexpr Tag DET = Tag::DET, ADJ = Tag::ADJ, NOUN = Tag::NOUN, VERB = Tag::VERB;

}  // namespace

TEST(MineGrams, HandEnumeratedExample) {
  auto t = mine_grams(corpus_of({{DET, ADJ, NOUN, VERB}, {DET, ADJ, NOUN}}), 3);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.entries[0].gram, (TagSeq{DET, ADJ, NOUN}));
  EXPECT_EQ(t.entries[0].count, 2u);
  EXPECT_EQ(t.entries[1].gram, (TagSeq{ADJ, NOUN, VERB}));
  EXPECT_EQ(t.entries[1].count, 1u);
}

TEST(MineGrams, LengthBeyondLongestSentenceGivesEmptyTable) {
  EXPECT_TRUE(mine_grams(corpus_of({{DET, NOUN}}), 5).empty());
}

TEST(MineGrams, RejectsShortLengthAndEmptyCorpus) {
  EXPECT_THROW(mine_grams(corpus_of({{DET, NOUN}}), 1), ArgumentError);
  EXPECT_THROW(mine_grams(TaggedCorpus{}, 3), ArgumentError);
}

TEST(MineGrams, MatchesBruteForceOnRandomCorpora) {
  Rng rng(2024, "test-mine");
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t alphabet = 2 + rng.below(kTagCount - 1);
    auto c = ts::random_corpus(rng, 1 + rng.below(200), 1 + rng.below(40), alphabet);
    for (std::size_t len : {2u, 3u, 5u, 13u}) {
      std::string why;
      EXPECT_TRUE(ts::table_matches_brute_force(mine_grams(c, len), c, len, &why)) << why;
    }
  }
}

TEST(MineGrams, CountsSumToNumberOfWindows) {
  Rng rng(77);
  auto c = ts::random_corpus(rng, 300, 25);
  for (std::size_t len = 2; len <= 6; ++len) {
    std::size_t windows = 0;
    for (const auto& s : c.sentences) windows += s.size() >= len ? s.size() - len + 1 : 0;
    const auto t = mine_grams(c, len);
    EXPECT_EQ(std::accumulate(t.entries.begin(), t.entries.end(), std::size_t{0},
                              [](std::size_t a, const GramCount& g) { return a + g.count; }),
              windows);
  }
}

TEST(MineGrams, ShardingDoesNotChangeTheTable) {
  Rng rng(8);
  auto c = ts::random_corpus(rng, 500, 30, 5);
  const auto one = mine_grams(c, 3, 1);
  for (std::size_t shards : {2u, 3u, 7u, 1000u}) EXPECT_EQ(mine_grams(c, 3, shards), one);
}

TEST(PatternTable, TsvRoundTripWithEscapedHyphens) {
  TaggedCorpus c;
  c.sentences.push_back({{"well-known", "a\\b", "x"}, {ADJ, NOUN, VERB}});
  c.sentences.push_back({{"the", "storm"}, {DET, NOUN}});
  const auto t = mine_grams(c, 2);
  std::stringstream buf;
  write_pattern_table(buf, t);
  EXPECT_NE(buf.str().find("well\\-known-a\\\\b"), std::string::npos);
  EXPECT_EQ(read_pattern_table(buf), t);
}

TEST(PatternTable, MalformedRowsAreParseErrors) {
  std::istringstream bad_count("DET-NOUN\tthe-storm\tmany\n");
  EXPECT_THROW(read_pattern_table(bad_count), ParseError);
  std::istringstream two_cols("DET-NOUN\tthe-storm\n");
  EXPECT_THROW(read_pattern_table(two_cols), ParseError);
}

TEST(SelectScp, SplitsTheChosenGram) {
  auto t = mine_grams(corpus_of({{DET, ADJ, NOUN}, {DET, ADJ, NOUN}, {ADJ, NOUN, VERB}}), 3);
  const auto scp = select_scp(t, 2, 1, 1, 0);
  EXPECT_EQ(scp.prefix, (TagSeq{DET, ADJ}));
  EXPECT_EQ(scp.key, (TagSeq{NOUN}));
}

TEST(SelectScp, DrawsOnlyFromTopKAndIsDeterministic) {
  Rng rng(9);
  auto t = mine_grams(ts::random_corpus(rng, 300, 20, 6), 3);
  ASSERT_GT(t.size(), 10u);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto scp = select_scp(t, 1, 2, 4, seed);
    bool in_top = false;
    for (std::size_t i = 0; i < 4; ++i) in_top |= t.entries[i].gram == scp.tags();
    EXPECT_TRUE(in_top);
    EXPECT_EQ(select_scp(t, 1, 2, 4, seed), scp);
    EXPECT_EQ(select_scp(t, 1, 2, 1, seed).tags(), t.entries[0].gram);
  }
}

TEST(SelectScp, Errors) {
  EXPECT_THROW(select_scp(PatternTable{}, 2, 1, 10, 0), Error);
  auto t = mine_grams(corpus_of({{DET, ADJ, NOUN}}), 3);
  EXPECT_THROW(select_scp(t, 1, 1, 10, 0), ArgumentError);
  EXPECT_THROW(select_scp(t, 3, 0, 10, 0), ArgumentError);
}

TEST(FindMatches, HandEnumeratedExamples) {
  const Scp scp{{DET, ADJ}, {NOUN}};
  auto one = find_matches(corpus_of({{DET, ADJ, NOUN}}), scp);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].start, 0u);
  EXPECT_EQ(one[0].prefix_span, (Span{0, 2}));
  EXPECT_EQ(one[0].key_span, (Span{2, 3}));

  auto two = find_matches(corpus_of({{DET, ADJ, NOUN, DET, ADJ, NOUN}}), scp);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[1].start, 3u);

  EXPECT_TRUE(find_matches(corpus_of({{ADJ, NOUN, VERB}}), scp).empty());
}

TEST(ScpText, FormatParseRoundTrip) {
  const Scp scp{{DET, ADJ}, {NOUN}};
  EXPECT_EQ(format_scp(scp), "DET-ADJ/NOUN");
  EXPECT_EQ(parse_scp("DET-ADJ/NOUN"), scp);
  EXPECT_THROW(parse_scp("DET-ADJ-NOUN"), ValidationError);
  EXPECT_THROW(parse_scp("/NOUN"), ValidationError);
  EXPECT_THROW(parse_scp("DET/"), ValidationError);
}
