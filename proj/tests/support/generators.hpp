#pragma once

// Small hand-rolled random generators for property tests. Everything is
// driven by a seeded std::mt19937_64 so failures reproduce from the seed.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tftest {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  std::size_t range(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

  std::string lower_word(std::size_t min_len, std::size_t max_len, std::string_view alphabet = "abcdefgh") {
    std::string w;
    const std::size_t n = range(min_len, max_len);
    for (std::size_t i = 0; i < n; ++i) w.push_back(alphabet[below(alphabet.size())]);
    return w;
  }

  // One tweet-ish fragment: words, handles, tags, links, emoji (including ZWJ
  // and modifier sequences), emoticons, punctuation runs and odd Unicode.
  std::string fragment() {
    static const std::vector<std::string> words = {"the", "Love", "coffee", "don't", "well-known", "café",
                                                   "naïve", "RT", "rt", "3.14", "1,000", "x2", "über",
                                                   "日本語", "Москва", "HTTPURL", "@USER", "ok"};
    static const std::vector<std::string> emoji = {
        "😂", "❤️", "👍🏽", "👨‍👩‍👧", "🇫🇷", "🔥", "☕", "✨", "🤷‍♀️", "1️⃣", "🏳️‍🌈", "🙃"};
    static const std::vector<std::string> emoticons = {":)", ":-(", ";D", "<3", "xD", ":P", "^_^", ":'("};
    static const std::vector<std::string> puncts = {"!", "!!", "???", ".", "...", ",", ":", "\"", "(", ")",
                                                    "-", "'", "…", "&", "*", "/"};
    switch (below(10)) {
      case 0: return "@" + lower_word(1, 18, "abcxyz_019");
      case 1: return "#" + lower_word(1, 8, "abcXYZ_9");
      case 2: return pick(std::vector<std::string>{"https://t.co/", "http://ex.am/p?q=", "www."}) + lower_word(1, 6);
      case 3: return pick(emoji);
      case 4: return pick(emoticons);
      case 5: return pick(puncts);
      case 6: return std::to_string(below(100000));
      default: return chance(0.5) ? pick(words) : lower_word(1, 9, "abcdefghijklmnopqrstuvwxyzABC");
    }
  }

  std::string tweet(std::size_t max_fragments = 25) {
    static const std::vector<std::string> gaps = {" ", " ", " ", "  ", "\t", "", "\u00A0"};
    std::string out;
    const std::size_t n = below(max_fragments + 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += pick(gaps);
      out += fragment();
    }
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace tftest
