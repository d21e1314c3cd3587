#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tweetforge/corpus.hpp"

namespace tweetforge {

/// Synthetic tweet corpus for fixtures and benchmarks: Zipf-distributed words
/// from the bundled seed text plus mentions, hashtags, links, emoji, emoticons
/// and numbers, with a controlled share of tweets every corpus filter rejects.
struct SynthConfig {
  std::size_t tweets = 1000;
  std::uint64_t seed = 1;
  double mean_words = 21.0;  // plain words per kept-style tweet
  double retweet_rate = 0.04;
  double foreign_rate = 0.04;  // es/fr tweets
  double short_rate = 0.03;    // fewer than 10 tokens
  double long_rate = 0.02;     // more than 64 tokens
};

std::vector<RawTweet> synth_tweets(const SynthConfig& cfg);

}  // namespace tweetforge
