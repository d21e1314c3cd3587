#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tweetforge/bpe.hpp"
#include "tweetforge/pack.hpp"

namespace tweetforge {

struct MaskPolicy {
  double mask_fraction = 0.15;
  double mask_prob = 0.8;
  double random_prob = 0.1;
  double keep_prob = 0.1;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  friend bool operator==(const MaskPolicy&, const MaskPolicy&) = default;
};

enum class MaskAction : std::uint8_t { mask = 0, random = 1, keep = 2 };

struct MaskedExample {
  std::uint64_t block_index = 0;
  std::uint32_t epoch = 0;
  std::vector<std::uint32_t> input_ids;
  std::vector<std::uint32_t> label_positions;  // ascending
  std::vector<std::uint32_t> labels;           // original ids at label_positions
  std::vector<MaskAction> actions;             // parallel to label_positions
  friend bool operator==(const MaskedExample&, const MaskedExample&) = default;
};

/// Dynamic MLM masking. Eligible positions hold non-special ids;
/// k = round-half-even(mask_fraction * eligible) of them are drawn without
/// replacement and then masked, replaced by a uniform non-special id below
/// `vocab_size`, or kept. All randomness comes from (seed, block.index, epoch).
MaskedExample mask_block(const SequenceBlock& block, const MaskPolicy& policy,
                         std::uint32_t epoch, std::size_t vocab_size,
                         const SpecialIds& specials = {});

std::vector<MaskedExample> mask_blocks(std::span<const SequenceBlock> blocks,
                                       const MaskPolicy& policy, std::uint32_t epoch,
                                       std::size_t vocab_size, int workers,
                                       const SpecialIds& specials = {});
std::vector<MaskedExample> mask_blocks_serial(std::span<const SequenceBlock> blocks,
                                              const MaskPolicy& policy, std::uint32_t epoch,
                                              std::size_t vocab_size,
                                              const SpecialIds& specials = {});

// Writes labels back into input_ids.
std::vector<std::uint32_t> restore_labels(const MaskedExample& ex);

}  // namespace tweetforge
