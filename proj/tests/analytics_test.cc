#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "termcorpus/analytics.h"
#include "termcorpus/error.h"
#include "test_util.h"

namespace termcorpus {
namespace {

using testing::data_path;
using testing::make_matched;
using testing::synthetic_corpus;
using testing::T;

MatchedCorpus two_sentences() {
  const auto council = T("Rat", "Council");
  return MatchedCorpus{
      {make_matched(0, "the Council and the market", {council, T("Markt", "market"),
                                                      T("und", "and")}),
       make_matched(1, "the Council met the public officer in Brussels",
                    {council, T("Beamter", "officer"),
                     T("öffentlicher Beamter", "public officer"), T("Brüssel", "Brussels")},
                    "der Rat traf den Beamten")},
      {}};
}

TEST(CorpusStatsTest, TwoSentenceFixture) {
  const auto stats = corpus_stats(two_sentences());
  EXPECT_EQ(stats.n_sentences, 2u);
  EXPECT_EQ(stats.n_terms, 7u);
  EXPECT_EQ(stats.avg_terms_per_sent, 3.5);
  EXPECT_EQ(stats.unique_terms_tgt, 6u);
  EXPECT_EQ(stats.avg_words_tgt, (5.0 + 8.0) / 2.0);
  EXPECT_EQ(stats.avg_words_src, (1.0 + 5.0) / 2.0);
  EXPECT_THROW(corpus_stats(MatchedCorpus{}), ValidationError);
}

TEST(CorpusStatsTest, SingleRepeatedTerm) {
  auto mc = synthetic_corpus({{2, 5}});
  const auto stats = corpus_stats(mc);
  EXPECT_EQ(stats.unique_terms_tgt, 1u);
  EXPECT_EQ(stats.unique_terms_src, 1u);
}

TEST(TopTermsTest, CountsAndTies) {
  std::vector<MatchedSentence> s;
  for (SentenceId i = 0; i < 7; ++i) s.push_back(make_matched(i, "Council", {T("Rat", "Council")}));
  for (SentenceId i = 7; i < 9; ++i) s.push_back(make_matched(i, "market", {T("Markt", "market")}));
  s.push_back(make_matched(9, "apple", {T("Apfel", "apple")}));
  s.push_back(make_matched(10, "zebra", {T("Zebra", "zebra")}));
  const MatchedCorpus mc{s, {}};
  using Row = std::pair<std::string, std::size_t>;
  EXPECT_EQ(top_terms(mc, 2), (std::vector<Row>{{"Council", 7}, {"market", 2}}));
  EXPECT_EQ(top_terms(mc, 100),
            (std::vector<Row>{{"Council", 7}, {"market", 2}, {"apple", 1}, {"zebra", 1}}));
  EXPECT_THROW(top_terms(mc, 0), ValidationError);
}

TEST(NgramHistogramTest, SmallAndTotals) {
  const MatchedCorpus mc{{make_matched(0, "a b c d", {T("x", "a"), T("y", "b"), T("z", "b c d")})},
                         {}};
  const auto h = ngram_histogram(mc);
  EXPECT_EQ(h.counts, (std::map<std::size_t, std::size_t>{{1, 2}, {3, 1}}));
  for (const auto& corpus : {mc, two_sentences(), synthetic_corpus({{1, 4}, {7, 3}})}) {
    EXPECT_EQ(ngram_histogram(corpus).total(), corpus_stats(corpus).n_terms);
  }
}

TEST(NgramHistogramTest, FixtureMatchesHandTally) {
  const auto mc = load_matched_corpus(data_path("fixture_golden.jsonl"));
  std::ostringstream out;
  write_histogram_csv(ngram_histogram(mc), out);
  std::ifstream expected(data_path("fixture_hist.csv"));
  EXPECT_EQ(out.str(), std::string(std::istreambuf_iterator<char>(expected), {}));
  EXPECT_EQ(ngram_histogram(mc).total(), corpus_stats(mc).n_terms);
}

}  // namespace
}  // namespace termcorpus
