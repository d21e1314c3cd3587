#include "tweetforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "tweetforge/rng.hpp"
#include "tweetforge/utf8.hpp"

namespace tweetforge {

namespace embedded {
extern const std::string_view langid_en;
extern const std::string_view langid_es;
extern const std::string_view langid_fr;
}  // namespace embedded

namespace {

// Words of a seed text ranked by frequency, with cumulative Zipf weights.
class Lexicon {
 public:
  explicit Lexicon(std::string_view text) {
    std::map<std::string, std::size_t> counts;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) ++counts[utf8::fold_case(cur)];
      cur.clear();
    };
    for (std::size_t i = 0; i < text.size();) {
      const auto d = utf8::decode(text, i);
      const bool letter = d.cp >= 0x80 ? !utf8::is_space(d.cp) && !utf8::is_punct(d.cp)
                                       : ((d.cp | 0x20) >= 'a' && (d.cp | 0x20) <= 'z');
      if (letter) {
        cur.append(text.substr(i, d.len));
      } else {
        flush();
      }
      i += d.len;
    }
    flush();
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (auto& [w, c] : counts) ranked.emplace_back(c, w);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double total = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      words_.push_back(ranked[r].second);
      total += 1.0 / std::pow(static_cast<double>(r + 1), 1.05);
      cdf_.push_back(total);
    }
    for (auto& c : cdf_) c /= total;
  }

  const std::string& draw(CounterRng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return words_[std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), words_.size() - 1)];
  }

 private:
  std::vector<std::string> words_;
  std::vector<double> cdf_;
};

constexpr const char* kEmoji[] = {"😂", "❤️", "😍", "🔥", "😭", "👍", "🙏", "😊", "🎉", "💯", "😎", "🤔"};
constexpr const char* kEmoticons[] = {":)", ":(", ":D", ";)", "<3", ":P", "xD", ":-)"};
constexpr const char* kHandles[] = {"john", "maria_g", "newsdesk", "coach_k", "sam", "techfan99",
                                    "weatherbot", "lucy", "the_real_ed", "citycouncil", "ana", "djmix"};
constexpr const char* kTags[] = {"fun", "MondayMotivation", "news", "covid19", "TBT", "music",
                                 "GameDay", "foodie", "travel", "tech", "weekend", "love"};
constexpr const char* kPunct[] = {",", ".", "!", "?", "!!", "...", ":"};

template <class T, std::size_t N>
const char* pick(const T (&arr)[N], CounterRng& rng) {
  return arr[rng.below(N)];
}

std::size_t draw_length(CounterRng& rng, double mean, double sd, std::size_t lo, std::size_t hi) {
  // Box-Muller.
  const double u1 = std::max(rng.uniform(), 1e-12);
  const double u2 = rng.uniform();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  const double v = std::nearbyint(mean + sd * z);
  return static_cast<std::size_t>(std::clamp(v, static_cast<double>(lo), static_cast<double>(hi)));
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
  return w;
}

}  // namespace

std::vector<RawTweet> synth_tweets(const SynthConfig& cfg) {
  static const Lexicon en(embedded::langid_en);
  static const Lexicon es(embedded::langid_es);
  static const Lexicon fr(embedded::langid_fr);
  const TweetTokenizer tokenizer;

  std::vector<RawTweet> out;
  out.reserve(cfg.tweets);
  for (std::size_t n = 0; n < cfg.tweets; ++n) {
    auto rng = CounterRng::keyed({cfg.seed, n});
    const double kind = rng.uniform();
    double edge = cfg.retweet_rate;
    const bool retweet = kind < edge;
    const bool foreign = !retweet && kind < (edge += cfg.foreign_rate);
    const bool is_short = !retweet && !foreign && kind < (edge += cfg.short_rate);
    const bool is_long = !retweet && !foreign && !is_short && kind < (edge += cfg.long_rate);

    const Lexicon* lex = &en;
    std::string lang = "en";
    if (foreign) {
      const bool spanish = rng.below(2) == 0;
      lex = spanish ? &es : &fr;
      lang = spanish ? "es" : "fr";
    }
    std::size_t words = draw_length(rng, cfg.mean_words, cfg.mean_words * 0.45, 8, 60);
    if (is_short) words = 1 + rng.below(6);
    if (is_long) words = 70 + rng.below(30);

    std::vector<std::string> parts;
    if (retweet) {
      parts.push_back("RT");
      parts.push_back(std::string("@") + pick(kHandles, rng) + ":");
    } else if (rng.uniform() < 0.3) {
      parts.push_back(std::string("@") + pick(kHandles, rng));
    }
    for (std::size_t i = 0; i < words; ++i) {
      std::string w = lex->draw(rng);
      if (i == 0 || rng.uniform() < 0.03) w = capitalize(std::move(w));
      if (rng.uniform() < 0.08) w += pick(kPunct, rng);
      parts.push_back(std::move(w));
      if (is_short) continue;
      const double extra = rng.uniform();
      if (extra < 0.02) {
        parts.push_back(std::to_string(1 + rng.below(2025)));
      } else if (extra < 0.035) {
        parts.push_back(pick(kEmoticons, rng));
      }
    }
    if (!is_short) {
      if (rng.uniform() < 0.35) parts.push_back(std::string("#") + pick(kTags, rng));
      if (rng.uniform() < 0.4) parts.push_back(pick(kEmoji, rng));
      if (rng.uniform() < 0.25) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "https://t.co/%08llx",
                      static_cast<unsigned long long>(rng.next() & 0xFFFFFFFFull));
        parts.push_back(buf);
      }
    }
    std::string text;
    for (const auto& p : parts) {
      if (!text.empty()) text.push_back(' ');
      text += p;
    }
    char id[32];
    std::snprintf(id, sizeof id, "t%07zu", n + 1);
    out.push_back(make_tweet(id, std::move(text), lang, false, tokenizer));
  }
  return out;
}

}  // namespace tweetforge
