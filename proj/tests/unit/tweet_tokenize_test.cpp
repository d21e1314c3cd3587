#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "tweetforge/emoji.hpp"
#include "tweetforge/tokenize.hpp"
#include "tweetforge/utf8.hpp"

using namespace tweetforge;

namespace {

std::vector<std::pair<std::string, TokenClass>> pairs(const TokenSequence& s) {
  std::vector<std::pair<std::string, TokenClass>> out;
  for (const auto& t : s.tokens) out.emplace_back(t.text, t.cls);
  return out;
}

}  // namespace

TEST(Tokenize, RetweetExampleIsFixtureLocked) {
  const auto seq = tokenize("RT @john: #fun https://t.co/x 😂!!");
  using C = TokenClass;
  const std::vector<std::pair<std::string, TokenClass>> want = {
      {"RT", C::rt_marker}, {"@john", C::mention}, {":", C::punct}, {"#fun", C::hashtag},
      {"https://t.co/x", C::url}, {"😂", C::emoji}, {"!!", C::punct}};
  EXPECT_EQ(pairs(seq), want);
}

TEST(Tokenize, EmptyAndPlain) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \t  ").empty());
  const auto seq = tokenize("hello world");
  ASSERT_EQ(seq.size(), 2u);
  EXPECT_EQ(seq.tokens[0].cls, TokenClass::word);
  EXPECT_EQ(seq.tokens[1].text, "world");
  EXPECT_EQ(seq.tokens[1].span, (Span{6, 11}));
}

TEST(Tokenize, RtOnlyAtStart) {
  const auto seq = tokenize("so RT this");
  EXPECT_EQ(seq.tokens[1].cls, TokenClass::word);
  EXPECT_EQ(classify_token("RT"), TokenClass::rt_marker);
  EXPECT_EQ(classify_token("RT", false), TokenClass::word);
}

TEST(Tokenize, MentionLengthLimit) {
  EXPECT_EQ(classify_token("@abcdefghijklmno"), TokenClass::mention);  // 15
  EXPECT_NE(classify_token("@abcdefghijklmnop"), TokenClass::mention);
  EXPECT_EQ(tokenize("@ alone").tokens[0].cls, TokenClass::punct);
}

TEST(Tokenize, Classify) {
  EXPECT_EQ(classify_token("@USER"), TokenClass::mention);
  EXPECT_EQ(classify_token("HTTPURL"), TokenClass::url);
  EXPECT_EQ(classify_token("#BERTweet2020"), TokenClass::hashtag);
  EXPECT_EQ(classify_token("www.example.com/a"), TokenClass::url);
  EXPECT_EQ(classify_token(":-)"), TokenClass::emoticon);
  EXPECT_EQ(classify_token("1,000.5"), TokenClass::number);
  EXPECT_EQ(classify_token("???"), TokenClass::punct);
  EXPECT_EQ(classify_token("don't"), TokenClass::word);
  EXPECT_EQ(classify_token("two words"), TokenClass::word);
  EXPECT_EQ(classify_token("#1"), TokenClass::word);
}

TEST(Tokenize, PunctRunsAndEmoticons) {
  EXPECT_EQ(tokenize("wait...").texts(), (std::vector<std::string>{"wait", "..."}));
  EXPECT_EQ(tokenize("no?!").texts(), (std::vector<std::string>{"no", "?", "!"}));
  EXPECT_EQ(tokenize("hi :) bye").tokens[1].cls, TokenClass::emoticon);
  // ":D" is only an emoticon when not glued to a following letter.
  EXPECT_EQ(tokenize(":Dx").tokens[0].text, ":");
  EXPECT_EQ(tokenize("xD").tokens[0].cls, TokenClass::emoticon);
}

TEST(Tokenize, EmojiSequencesAreSingleTokens) {
  for (const char* e : {"👨‍👩‍👧", "👍🏽", "🇫🇷", "❤️", "1️⃣", "🏳️‍🌈"}) {
    const auto seq = tokenize(std::string("a") + " " + e + " b");
    ASSERT_EQ(seq.size(), 3u) << e;
    EXPECT_EQ(seq.tokens[1].cls, TokenClass::emoji) << e;
    EXPECT_EQ(seq.tokens[1].text, e);
  }
  EXPECT_EQ(tokenize("😂😂").size(), 2u);
}

TEST(Tokenize, InvalidUtf8IsTotal) {
  const std::string bad = "ok \xff\xfe bad \xc3";
  const auto seq = tokenize(bad);
  EXPECT_FALSE(seq.empty());
  for (const auto& t : seq.tokens) EXPECT_EQ(t.text, bad.substr(t.span.start, t.span.end - t.span.start));
}

TEST(Tokenize, EveryTableEmojiIsOneEmojiToken) {
  // Walk the bundled table and check each sequence on its own and between words.
  std::size_t checked = 0;
  const auto& builtin = EmojiTable::builtin();
  ASSERT_GT(builtin.size(), 3000u);
  std::ifstream f(std::string(TWEETFORGE_DATA_DIR) + "/emoji.tsv");
  ASSERT_TRUE(f);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    std::string emoji;
    std::istringstream hex(line.substr(0, tab));
    std::string cp;
    while (hex >> cp) utf8::append(emoji, static_cast<char32_t>(std::stoul(cp, nullptr, 16)));
    const auto seq = tokenize("x " + emoji + " y");
    ASSERT_EQ(seq.size(), 3u) << line;
    EXPECT_EQ(seq.tokens[1].cls, TokenClass::emoji) << line;
    EXPECT_EQ(seq.tokens[1].text, emoji) << line;
    ++checked;
  }
  EXPECT_EQ(checked, builtin.size());
}

// ---- properties over generated tweets

TEST(TokenizeProperty, SpansAreOrderedSlicesWithWhitespaceBetween) {
  tftest::Gen g(101);
  for (int n = 0; n < 3000; ++n) {
    const std::string text = g.tweet();
    const auto seq = tokenize(text);
    std::size_t prev = 0;
    for (const auto& t : seq.tokens) {
      ASSERT_LT(t.span.start, t.span.end);
      ASSERT_GE(t.span.start, prev);
      ASSERT_EQ(t.text, text.substr(t.span.start, t.span.end - t.span.start));
      for (std::size_t i = prev; i < t.span.start;) {
        const auto d = utf8::decode(text, i);
        ASSERT_TRUE(d.valid && utf8::is_space(d.cp)) << "byte " << i << " before " << t.text << " in " << text;
        i += d.len;
      }
      prev = t.span.end;
    }
  }
}

TEST(TokenizeProperty, StableUnderItsOwnOutput) {
  tftest::Gen g(202);
  for (int n = 0; n < 3000; ++n) {
    const std::string text = g.tweet();
    const auto once = tokenize(text);
    const auto twice = tokenize(once.joined());
    ASSERT_EQ(once.texts(), twice.texts()) << text;
  }
}

TEST(TokenizeProperty, ClassifyAgreesWithTokenize) {
  tftest::Gen g(303);
  for (int n = 0; n < 3000; ++n) {
    const std::string text = g.tweet();
    const auto seq = tokenize(text);
    for (std::size_t i = 0; i < seq.size(); ++i)
      ASSERT_EQ(classify_token(seq.tokens[i].text, i == 0), seq.tokens[i].cls)
          << "'" << seq.tokens[i].text << "' in " << text;
  }
}

TEST(TokenizeProperty, CountAndPrefixMatchFullTokenize) {
  tftest::Gen g(404);
  const TweetTokenizer tok;
  for (int n = 0; n < 500; ++n) {
    const std::string text = g.tweet();
    const auto seq = tok.tokenize(text);
    EXPECT_EQ(tok.count_tokens(text), seq.size());
    const std::size_t k = g.below(seq.size() + 2);
    const auto prefix = tok.tokenize_prefix(text, k);
    ASSERT_EQ(prefix.size(), std::min(k, seq.size()));
    for (std::size_t i = 0; i < prefix.size(); ++i) EXPECT_EQ(prefix[i], seq.tokens[i]);
  }
}
