#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "tweetforge/bpe.hpp"

namespace tweetforge {

// One tweet inside a block, positions [start, end) including its bos and eos.
struct Segment {
  std::string tweet_id;
  std::uint32_t start = 0;
  std::uint32_t end = 0;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SequenceBlock {
  std::uint64_t index = 0;  // emission order
  std::vector<std::uint32_t> ids;
  std::vector<Segment> segments;
  std::uint32_t pad_count = 0;
  friend bool operator==(const SequenceBlock&, const SequenceBlock&) = default;
};

struct PackConfig {
  std::size_t block_length = 128;
  // Blocks kept open for first-fit placement. 1 gives strict next-fit: a tweet
  // that does not fit closes the current block.
  std::size_t open_blocks = 8;
  SpecialIds specials;

  void validate() const;  // throws ConfigError
};

struct PackStats {
  std::uint64_t tweets = 0;
  std::uint64_t blocks = 0;
  std::uint64_t truncated = 0;
  std::uint64_t subword_ids = 0;  // after truncation
  std::uint64_t pad_ids = 0;
  friend bool operator==(const PackStats&, const PackStats&) = default;
};

/// Greedy first-fit packing in stream order. Each tweet becomes
/// bos + ids + eos, truncated to block_length - 2 ids, and goes into the
/// oldest open block with room; otherwise a new block opens, evicting (emitting)
/// the oldest one if the window is full. Tweets are never split across blocks.
class BlockPacker {
 public:
  explicit BlockPacker(PackConfig cfg);

  void add(std::string_view tweet_id, std::span<const std::uint32_t> ids);
  // Emits every open block.
  void finish();

  // Blocks emitted so far and not yet taken.
  std::vector<SequenceBlock> take();
  const PackStats& stats() const noexcept { return stats_; }

 private:
  struct Open {
    SequenceBlock block;  // ids unpadded while open
  };
  void emit(std::size_t slot);

  PackConfig cfg_;
  std::deque<Open> open_;
  std::vector<SequenceBlock> ready_;
  PackStats stats_;
};

struct PackInput {
  std::string tweet_id;
  std::vector<std::uint32_t> ids;
};

std::vector<SequenceBlock> pack_blocks(std::span<const PackInput> tweets, const PackConfig& cfg,
                                       PackStats* stats = nullptr);

}  // namespace tweetforge
