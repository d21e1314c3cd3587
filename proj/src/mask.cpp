#include "tweetforge/mask.hpp"

#include <algorithm>
#include <cmath>

#include "tweetforge/rng.hpp"

namespace tweetforge {

void MaskPolicy::validate() const {
  if (!(mask_fraction > 0.0 && mask_fraction < 1.0))
    throw ConfigError("mask_fraction must be within (0, 1)");
  if (mask_prob < 0 || random_prob < 0 || keep_prob < 0)
    throw ConfigError("mask action probabilities must be non-negative");
  if (std::abs(mask_prob + random_prob + keep_prob - 1.0) > 1e-9)
    throw ConfigError("mask action probabilities must sum to 1");
}

MaskedExample mask_block(const SequenceBlock& block, const MaskPolicy& policy,
                         std::uint32_t epoch, std::size_t vocab_size, const SpecialIds& specials) {
  if (vocab_size <= specials.count)
    throw ConfigError("vocabulary has no non-special ids to sample from");
  MaskedExample ex;
  ex.block_index = block.index;
  ex.epoch = epoch;
  ex.input_ids = block.ids;

  std::vector<std::uint32_t> eligible;
  for (std::uint32_t i = 0; i < block.ids.size(); ++i)
    if (!specials.is_special(block.ids[i])) eligible.push_back(i);
  const auto k = static_cast<std::size_t>(
      std::nearbyint(policy.mask_fraction * static_cast<double>(eligible.size())));
  if (k == 0) return ex;

  auto rng = CounterRng::keyed({policy.seed, block.index, epoch});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(k);
  std::sort(eligible.begin(), eligible.end());

  ex.label_positions = eligible;
  ex.labels.reserve(k);
  ex.actions.reserve(k);
  const std::uint64_t random_span = vocab_size - specials.count;
  for (std::uint32_t pos : eligible) {
    ex.labels.push_back(block.ids[pos]);
    const double u = rng.uniform();
    if (u < policy.mask_prob) {
      ex.actions.push_back(MaskAction::mask);
      ex.input_ids[pos] = specials.mask;
    } else if (u < policy.mask_prob + policy.random_prob) {
      ex.actions.push_back(MaskAction::random);
      ex.input_ids[pos] = static_cast<std::uint32_t>(specials.count + rng.below(random_span));
    } else {
      ex.actions.push_back(MaskAction::keep);
    }
  }
  return ex;
}

std::vector<MaskedExample> mask_blocks_serial(std::span<const SequenceBlock> blocks,
                                              const MaskPolicy& policy, std::uint32_t epoch,
                                              std::size_t vocab_size, const SpecialIds& specials) {
  std::vector<MaskedExample> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(mask_block(b, policy, epoch, vocab_size, specials));
  return out;
}

std::vector<MaskedExample> mask_blocks(std::span<const SequenceBlock> blocks,
                                       const MaskPolicy& policy, std::uint32_t epoch,
                                       std::size_t vocab_size, int workers,
                                       const SpecialIds& specials) {
  if (workers <= 1) return mask_blocks_serial(blocks, policy, epoch, vocab_size, specials);
  if (vocab_size <= specials.count)
    throw ConfigError("vocabulary has no non-special ids to sample from");
  std::vector<MaskedExample> out(blocks.size());
  const auto n = static_cast<std::ptrdiff_t>(blocks.size());
#pragma omp parallel for num_threads(workers) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] = mask_block(blocks[u], policy, epoch, vocab_size, specials);
  }
  return out;
}

std::vector<std::uint32_t> restore_labels(const MaskedExample& ex) {
  auto ids = ex.input_ids;
  for (std::size_t i = 0; i < ex.label_positions.size(); ++i) ids[ex.label_positions[i]] = ex.labels[i];
  return ids;
}

}  // namespace tweetforge
