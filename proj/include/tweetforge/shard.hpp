#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tweetforge/common.hpp"
#include "tweetforge/mask.hpp"
#include "tweetforge/pack.hpp"

namespace tweetforge {

/// Shard file layout (all integers little-endian):
///   magic "TFSHARD\0" | u32 version | u32 kind | u32 block_length | u64 records
///   records...
///   u32 crc32 of every preceding byte
/// A manifest.json next to the shards lists names, counts and checksums.
inline constexpr std::uint32_t kShardVersion = 1;

enum class ShardKind : std::uint32_t { blocks = 1, masked = 2 };

// Failure confined to one shard; the others stay readable.
class ShardError : public FormatError {
 public:
  ShardError(std::string shard, const std::string& what)
      : FormatError(shard + ": " + what), shard_(std::move(shard)) {}
  const std::string& shard() const noexcept { return shard_; }

 private:
  std::string shard_;
};

struct ShardInfo {
  std::string name;
  std::uint64_t records = 0;
  std::uint32_t crc32 = 0;
  friend bool operator==(const ShardInfo&, const ShardInfo&) = default;
};

struct ShardManifest {
  ShardKind kind = ShardKind::blocks;
  std::uint32_t block_length = 0;
  std::uint64_t shard_size = 0;
  std::uint64_t record_count = 0;
  std::vector<ShardInfo> shards;
  SpecialIds specials;
  std::optional<MaskPolicy> mask_policy;  // masked shards only
  std::optional<std::uint32_t> epoch;
  friend bool operator==(const ShardManifest&, const ShardManifest&) = default;
};

inline constexpr const char* kManifestName = "manifest.json";
std::string shard_name(std::size_t one_based);

ShardManifest write_shards(const std::filesystem::path& dir, std::span<const SequenceBlock> blocks,
                           std::uint64_t shard_size, std::uint32_t block_length,
                           const SpecialIds& specials = {});
ShardManifest write_shards(const std::filesystem::path& dir, std::span<const MaskedExample> examples,
                           std::uint64_t shard_size, std::uint32_t block_length,
                           const MaskPolicy& policy, std::uint32_t epoch,
                           const SpecialIds& specials = {});

ShardManifest read_manifest(const std::filesystem::path& dir);

// Single shard; throws ShardError naming the shard on any corruption.
std::vector<SequenceBlock> read_block_shard(const std::filesystem::path& file);
std::vector<MaskedExample> read_masked_shard(const std::filesystem::path& file);

// Every shard listed in the manifest, in order.
std::vector<SequenceBlock> read_block_shards(const std::filesystem::path& dir);
std::vector<MaskedExample> read_masked_shards(const std::filesystem::path& dir);

}  // namespace tweetforge
