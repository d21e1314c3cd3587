#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tweetforge/bpe.hpp"
#include "tweetforge/emoji.hpp"

namespace tweetforge {

/// Hot per-tweet paths, each with an OpenMP version (one cached encoder per
/// thread, static schedule, results in input order) and a serial reference.

// Whitespace-separated (already normalized) lines -> subword sequences.
std::vector<SubwordSequence> encode_lines(std::span<const std::string> lines, const MergeTable& table,
                                          int workers);
std::vector<SubwordSequence> encode_lines_serial(std::span<const std::string> lines,
                                                 const MergeTable& table);

// Raw tweet text -> tokenize -> soft normalize -> BPE ids.
std::vector<std::vector<std::uint32_t>> encode_raw_tweets(std::span<const std::string> texts,
                                                          const MergeTable& table,
                                                          const EmojiTable& emoji, int workers);
std::vector<std::vector<std::uint32_t>> encode_raw_tweets_serial(std::span<const std::string> texts,
                                                                 const MergeTable& table,
                                                                 const EmojiTable& emoji);

}  // namespace tweetforge
