#include "tweetforge/pack.hpp"

namespace tweetforge {

void PackConfig::validate() const {
  if (block_length < 3) throw ConfigError("block_length must be at least 3");
  if (block_length > (1u << 20)) throw ConfigError("block_length is unreasonably large");
  if (open_blocks < 1) throw ConfigError("open_blocks must be at least 1");
}

BlockPacker::BlockPacker(PackConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void BlockPacker::emit(std::size_t slot) {
  SequenceBlock b = std::move(open_[slot].block);
  open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(slot));
  b.index = stats_.blocks++;
  b.pad_count = static_cast<std::uint32_t>(cfg_.block_length - b.ids.size());
  b.ids.resize(cfg_.block_length, cfg_.specials.pad);
  stats_.pad_ids += b.pad_count;
  ready_.push_back(std::move(b));
}

void BlockPacker::add(std::string_view tweet_id, std::span<const std::uint32_t> ids) {
  const std::size_t cap = cfg_.block_length - 2;
  if (ids.size() > cap) {
    ids = ids.first(cap);
    ++stats_.truncated;
  }
  ++stats_.tweets;
  stats_.subword_ids += ids.size();
  const std::size_t need = ids.size() + 2;

  std::size_t slot = 0;
  while (slot < open_.size() && open_[slot].block.ids.size() + need > cfg_.block_length) ++slot;
  if (slot == open_.size()) {
    if (open_.size() == cfg_.open_blocks) {
      emit(0);
      --slot;
    }
    open_.emplace_back();
    open_.back().block.ids.reserve(cfg_.block_length);
  }
  auto& b = open_[slot].block;
  const auto start = static_cast<std::uint32_t>(b.ids.size());
  b.ids.push_back(cfg_.specials.bos);
  b.ids.insert(b.ids.end(), ids.begin(), ids.end());
  b.ids.push_back(cfg_.specials.eos);
  b.segments.push_back(Segment{std::string(tweet_id), start, static_cast<std::uint32_t>(b.ids.size())});
  // Nothing fits into fewer than three free slots.
  if (cfg_.block_length - b.ids.size() < 3) emit(slot);
}

void BlockPacker::finish() {
  while (!open_.empty()) emit(0);
}

std::vector<SequenceBlock> BlockPacker::take() {
  std::vector<SequenceBlock> out;
  out.swap(ready_);
  return out;
}

std::vector<SequenceBlock> pack_blocks(std::span<const PackInput> tweets, const PackConfig& cfg,
                                       PackStats* stats) {
  BlockPacker packer(cfg);
  for (const auto& t : tweets) packer.add(t.tweet_id, t.ids);
  packer.finish();
  if (stats) *stats = packer.stats();
  return packer.take();
}

}  // namespace tweetforge
