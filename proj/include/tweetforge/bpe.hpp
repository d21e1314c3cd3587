#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tweetforge/common.hpp"
#include "tweetforge/tokenize.hpp"

namespace tweetforge {

inline constexpr std::string_view kContinuationMarker = "@@";
inline constexpr std::string_view kEndOfWord = "</w>";
inline constexpr std::string_view kMergesHeader = "#tweetforge-bpe v1";

/// Reserved vocabulary ids. Specials always occupy ids [0, count).
struct SpecialIds {
  std::uint32_t pad = 0;
  std::uint32_t unk = 1;
  std::uint32_t bos = 2;
  std::uint32_t eos = 3;
  std::uint32_t mask = 4;
  std::uint32_t count = 5;

  bool is_special(std::uint32_t id) const noexcept { return id < count; }
  friend bool operator==(const SpecialIds&, const SpecialIds&) = default;
};

inline constexpr std::string_view kSpecialPieces[] = {"<pad>", "<unk>", "<s>", "</s>", "<mask>"};

struct MergeRule {
  std::string left;
  std::string right;
  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

/// Ordered BPE merges plus the subword vocabulary derived from them.
///
/// Learning symbols are strings; the end-of-word sentinel is the separate
/// symbol "</w>", and symbols that absorbed it end in "</w>". Output pieces
/// drop the sentinel and carry "@@" when they do not end a word, so each
/// symbol has a word-final piece and (unless it contains the sentinel) a
/// continuation piece. Both forms are vocabulary entries.
class MergeTable {
 public:
  MergeTable();
  MergeTable(std::vector<MergeRule> merges, std::vector<std::string> vocab);

  const std::vector<MergeRule>& merges() const noexcept { return merges_; }
  const std::vector<std::string>& vocab() const noexcept { return vocab_; }
  std::size_t vocab_size() const noexcept { return vocab_.size(); }
  const SpecialIds& specials() const noexcept { return specials_; }

  std::uint32_t piece_id(std::string_view piece) const;  // unk when absent
  bool contains_piece(std::string_view piece) const { return piece_ids_.find(piece) != piece_ids_.end(); }
  const std::string& piece(std::uint32_t id) const { return vocab_.at(id); }

  friend bool operator==(const MergeTable& a, const MergeTable& b) {
    return a.merges_ == b.merges_ && a.vocab_ == b.vocab_;
  }

  // Encoder lookup structures.
  struct PairInfo {
    std::uint32_t rank;
    std::uint32_t result;
  };
  static constexpr std::uint32_t kNoSymbol = 0xFFFFFFFFu;
  std::uint32_t symbol_id(std::string_view symbol) const;
  const PairInfo* find_pair(std::uint32_t left, std::uint32_t right) const;
  std::uint32_t end_of_word_symbol() const noexcept { return eow_symbol_; }

 private:
  std::vector<MergeRule> merges_;
  std::vector<std::string> vocab_;
  SpecialIds specials_;
  StringMap<std::uint32_t> piece_ids_;
  StringMap<std::uint32_t> symbol_ids_;
  std::unordered_map<std::uint64_t, PairInfo> pairs_;
  std::uint32_t eow_symbol_ = kNoSymbol;
};

// Vocabulary pieces contributed by one learning symbol, in insertion order.
std::vector<std::string> pieces_for_symbol(std::string_view symbol);

/// Tokens that are never split: @USER, HTTPURL, emoji aliases (":name:") and
/// raw emoji clusters.
bool is_atomic_token(std::string_view token);

struct SubwordSequence {
  std::vector<std::uint32_t> ids;
  std::vector<std::string> pieces;
  std::vector<std::size_t> word_boundaries;  // index of each word's first piece
  std::size_t unk_count = 0;

  std::size_t size() const noexcept { return ids.size(); }
  std::string joined() const;  // pieces separated by single spaces
  friend bool operator==(const SubwordSequence&, const SubwordSequence&) = default;
};

/// Segments one word. Merges apply in table order, each to every occurrence
/// left to right; implemented as repeated lowest-rank-above-last selection.
void encode_word(std::string_view word, const MergeTable& table, SubwordSequence& out);

SubwordSequence apply_bpe(const TokenSequence& tokens, const MergeTable& table);
SubwordSequence apply_bpe(std::span<const std::string> words, const MergeTable& table);

/// apply_bpe with a per-instance word cache. Not thread-safe; use one per worker.
class BpeEncoder {
 public:
  explicit BpeEncoder(const MergeTable& table, std::size_t max_cache_entries = 1u << 18)
      : table_(&table), max_cache_(max_cache_entries) {}

  void encode_word(std::string_view word, SubwordSequence& out);
  SubwordSequence encode(const TokenSequence& tokens);
  SubwordSequence encode(std::span<const std::string> words);

 private:
  struct Cached {
    std::vector<std::uint32_t> ids;
    std::vector<std::string> pieces;
    std::size_t unk = 0;
  };
  const MergeTable* table_;
  std::size_t max_cache_;
  StringMap<Cached> cache_;
  SubwordSequence scratch_;
};

std::vector<std::string> decode_bpe(const SubwordSequence& seq);

struct BpeLearnConfig {
  std::size_t target_vocab = 64000;  // including specials
  std::uint64_t min_pair_freq = 2;
  int workers = 1;
};

using WordCounts = StringMap<std::uint64_t>;

// Whitespace-split word counts over pre-tokenized lines.
WordCounts count_words(std::span<const std::string> lines, int workers = 1);
WordCounts count_words_serial(std::span<const std::string> lines);

struct BpeLearnStats {
  std::size_t base_pieces = 0;
  std::size_t skipped_words = 0;  // words containing the reserved "</w>" marker
  std::uint64_t final_max_pair_freq = 0;
};

/// Greedy BPE: repeatedly merge the most frequent adjacent symbol pair; ties go
/// to the bytewise smallest (left, right), with the sentinel ordered after every
/// character. Stops when the next merge
/// would push the vocabulary past `target_vocab` or when the best pair occurs
/// fewer than `min_pair_freq` times.
MergeTable learn_bpe(const WordCounts& words, const BpeLearnConfig& cfg,
                     BpeLearnStats* stats = nullptr);

// Symbol-pair frequencies over a word list, keyed by (left << 32 | right).
using PairCounts = std::unordered_map<std::uint64_t, std::int64_t>;
struct SymbolWord {
  std::vector<std::uint32_t> symbols;
  std::uint64_t count = 0;
};
PairCounts count_pairs(std::span<const SymbolWord> words, int workers);
PairCounts count_pairs_serial(std::span<const SymbolWord> words);

inline std::uint64_t pair_key(std::uint32_t left, std::uint32_t right) noexcept {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

// Merges file at `merges_path`, vocabulary at `vocab_path_for(merges_path)`
// unless given explicitly.
std::filesystem::path vocab_path_for(const std::filesystem::path& merges_path);
void save_merges(const MergeTable& table, const std::filesystem::path& merges_path,
                 const std::filesystem::path& vocab_path = {});
MergeTable load_merges(const std::filesystem::path& merges_path,
                       const std::filesystem::path& vocab_path = {});

}  // namespace tweetforge
