#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"
#include "tweetforge/bpe.hpp"
#include "tweetforge/corpus.hpp"
#include "tweetforge/langid.hpp"
#include "tweetforge/synth.hpp"

using namespace tweetforge;

namespace {

std::string words(std::size_t n) {
  static const char* pool[] = {"the", "cat", "sat", "on", "a", "mat", "and", "was", "very", "happy"};
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += std::string(i ? " " : "") + pool[i % 10];
  return s;
}

struct Fixture {
  TweetTokenizer tokenizer;
  PassThroughIdentifier meta;
  FilterConfig cfg;
  CorpusFilter filter() const { return CorpusFilter(cfg, tokenizer, meta); }
};

}  // namespace

TEST(LangId, BuiltinModel) {
  const auto& m = NgramLanguageModel::builtin();
  EXPECT_EQ(m.languages(), (std::vector<std::string>{"en", "es", "fr"}));
  EXPECT_EQ(identify_language("the quick brown fox jumps", m).lang, "en");
  EXPECT_EQ(identify_language("el perro come en la casa de mi abuela", m).lang, "es");
  EXPECT_EQ(identify_language("je ne sais pas pourquoi il fait si froid", m).lang, "fr");
  EXPECT_EQ(identify_language("", m), (LangScore{"und", 0.0}));
  EXPECT_EQ(identify_language("1234 !!! :)", m).lang, "und");
  const auto a = identify_language("the quick brown fox jumps", m);
  EXPECT_GT(a.confidence, 0.5);
  EXPECT_LE(a.confidence, 1.0);
  EXPECT_EQ(a, identify_language("the quick brown fox jumps", m));
}

TEST(LangId, PassThrough) {
  PassThroughIdentifier p;
  EXPECT_EQ(identify_language("anything", p, "en"), (LangScore{"en", 1.0}));
  EXPECT_EQ(identify_language("anything", p).lang, "und");
}

TEST(Ingest, ReaderJsonl) {
  std::istringstream in(
      R"({"id":"a","text":"hello there","lang":"en","created_at":"Mon"})"
      "\n"
      R"({"id":17,"text":"RT @bob: hi"})"
      "\n"
      "not json\n\n"
      R"({"id":"c","text":"x","retweeted_status":{"id":1}})"
      "\n"
      R"({"id":"d"})"
      "\n");
  const auto r = read_tweets(in, IngestFormat::jsonl);
  ASSERT_EQ(r.tweets.size(), 3u);
  EXPECT_EQ(r.malformed, 2u);
  EXPECT_EQ(r.tweets[0].lang_hint, "en");
  EXPECT_EQ(r.tweets[0].timestamp, "Mon");
  EXPECT_FALSE(r.tweets[0].is_retweet);
  EXPECT_EQ(r.tweets[1].id, "17");
  EXPECT_TRUE(r.tweets[1].is_retweet);
  EXPECT_TRUE(r.tweets[2].is_retweet);
}

TEST(Ingest, ReaderTextAndRoundTrip) {
  std::istringstream in("first line\n\nthird \xff\nfourth\n");
  const auto r = read_tweets(in, IngestFormat::text);
  ASSERT_EQ(r.tweets.size(), 2u);
  EXPECT_EQ(r.tweets[0].id, "1");
  EXPECT_EQ(r.tweets[1].id, "4");
  EXPECT_EQ(r.malformed, 1u);

  std::ostringstream out;
  const RawTweet t{"x1", "line \"quoted\" é", std::string("en"), std::string("now"), true};
  write_tweet(out, t, IngestFormat::jsonl);
  std::istringstream back(out.str());
  const auto rr = read_tweets(back, IngestFormat::jsonl);
  ASSERT_EQ(rr.tweets.size(), 1u);
  EXPECT_EQ(rr.tweets[0], t);
}

TEST(Filter, Boundaries) {
  Fixture f;
  const auto filter = f.filter();
  EXPECT_EQ(filter.check(make_tweet("1", words(9), "en")).drop, DropReason::too_short);
  EXPECT_FALSE(filter.check(make_tweet("2", words(10), "en")).drop);
  EXPECT_FALSE(filter.check(make_tweet("3", words(64), "en")).drop);
  EXPECT_EQ(filter.check(make_tweet("4", words(65), "en")).drop, DropReason::too_long);
  EXPECT_EQ(filter.check(make_tweet("5", words(12), "fr")).drop, DropReason::language);
  EXPECT_EQ(filter.check(make_tweet("6", "RT @x : hello world one two three four five six", "en")).drop,
            DropReason::retweet);
  // RT without a following mention is an ordinary tweet.
  EXPECT_FALSE(filter.check(make_tweet("7", "RT this is a sentence with ten tokens in it", "en")).drop);
  // Emoji count as one token each.
  EXPECT_FALSE(filter.check(make_tweet("8", words(9) + " 👨‍👩‍👧", "en")).drop);
}

TEST(Filter, KeywordsAndConfig) {
  Fixture f;
  f.cfg.keywords = std::vector<std::string>{"covid19", "sars-cov-2"};
  const auto filter = f.filter();
  EXPECT_FALSE(filter.check(make_tweet("1", words(10) + " SARS-CoV-2", "en")).drop);
  EXPECT_EQ(filter.check(make_tweet("2", words(10), "en")).drop, DropReason::keyword);

  FilterConfig bad;
  bad.min_tokens = 70;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = {};
  bad.keywords = std::vector<std::string>{"UPPER"};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Filter, StatsReport) {
  CorpusStats s;
  s.tweets_in = 3;
  s.tweets_kept = 1;
  s.tokens_total = 10;
  s.drop_reasons = {{"retweet", 1}, {"too_short", 1}};
  std::ostringstream out;
  s.write_report(out);
  EXPECT_NE(out.str().find("tweets_in=3\n"), std::string::npos);
  EXPECT_NE(out.str().find("dropped.retweet=1\n"), std::string::npos);
  EXPECT_EQ(s.dropped(), 2u);
}

TEST(CorpusStats, Examples) {
  const TweetTokenizer tok;
  const std::vector<RawTweet> two{make_tweet("a", words(10)), make_tweet("b", words(12))};
  const auto s = corpus_stats(two, tok);
  EXPECT_EQ(s.tokens_total, 22u);
  EXPECT_FALSE(s.subwords_total);
  EXPECT_EQ(corpus_stats({}, tok), CorpusStats{});

  WordCounts wc;
  for (auto w : {"the", "cat", "sat", "on", "a", "mat", "and", "was", "very", "happy"}) wc[w] = 3;
  const auto table = learn_bpe(wc, BpeLearnConfig{5000, 2, 1});
  const auto with = corpus_stats(two, tok, &table);
  ASSERT_TRUE(with.subwords_total);
  EXPECT_EQ(*with.subwords_total, 22u);  // every word is a single merged piece
}

// ---- properties

TEST(FilterProperty, ConservationOrderIdempotenceAndWorkers) {
  SynthConfig sc;
  sc.tweets = 600;
  sc.seed = 99;
  const auto tweets = synth_tweets(sc);
  const TweetTokenizer tok;
  const auto& lid = NgramLanguageModel::builtin();
  for (int variant = 0; variant < 3; ++variant) {
    FilterConfig cfg;
    if (variant == 1) cfg.keywords = std::vector<std::string>{"the", "#"};
    if (variant == 2) cfg.target_lang.clear();
    const CorpusFilter filter(cfg, tok, lid);
    const auto serial = filter_corpus_serial(tweets, filter);
    const auto& st = serial.stats;
    EXPECT_EQ(st.tweets_in, tweets.size());
    EXPECT_EQ(st.tweets_in, st.tweets_kept + st.dropped());
    EXPECT_EQ(st.tweets_kept, serial.kept.size());

    // Kept tweets appear in input order.
    std::size_t j = 0;
    for (const auto& t : tweets)
      if (j < serial.kept.size() && t == serial.kept[j]) ++j;
    EXPECT_EQ(j, serial.kept.size());

    const auto again = filter_corpus_serial(serial.kept, filter);
    EXPECT_EQ(again.kept, serial.kept);

    for (int w : {2, 4, 8}) {
      const auto par = filter_corpus(tweets, filter, w);
      EXPECT_EQ(par.kept, serial.kept);
      EXPECT_EQ(par.stats, serial.stats);
    }
  }
}

TEST(FilterProperty, StatsMergeIsAssociativeAndCommutative) {
  tftest::Gen g(5);
  auto random_stats = [&] {
    CorpusStats s;
    s.tweets_in = g.below(100);
    s.tweets_kept = g.below(50);
    s.tokens_total = g.below(1000);
    if (g.chance(0.5)) s.subwords_total = g.below(1000);
    for (auto r : {"retweet", "language", "too_short"})
      if (g.chance(0.7)) s.drop_reasons[r] = g.below(20);
    return s;
  };
  for (int n = 0; n < 500; ++n) {
    auto a = random_stats(), b = random_stats(), c = random_stats();
    auto ab = a;
    ab.merge(b);
    auto ab_c = ab;
    ab_c.merge(c);
    auto bc = b;
    bc.merge(c);
    auto a_bc = a;
    a_bc.merge(bc);
    EXPECT_EQ(ab_c, a_bc);
    auto ba = b;
    ba.merge(a);
    EXPECT_EQ(ab, ba);
  }
}

TEST(LangIdProperty, DeterministicAcrossThreads) {
  tftest::Gen g(6);
  std::vector<RawTweet> tweets;
  for (int i = 0; i < 400; ++i) tweets.push_back(make_tweet(std::to_string(i), g.tweet(30), "en"));
  FilterConfig cfg;
  cfg.min_tokens = 1;
  cfg.lang_min_confidence = 0.6;
  const CorpusFilter filter(cfg, TweetTokenizer(), NgramLanguageModel::builtin());
  const auto serial = filter_corpus_serial(tweets, filter);
  for (int w : {3, 8}) EXPECT_EQ(filter_corpus(tweets, filter, w).kept, serial.kept);
}
