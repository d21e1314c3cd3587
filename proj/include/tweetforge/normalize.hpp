#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetforge/common.hpp"
#include "tweetforge/emoji.hpp"
#include "tweetforge/tokenize.hpp"

namespace tweetforge {

enum class NormMode { soft, hard };

std::string_view to_string(NormMode m) noexcept;

struct TokenChange {
  std::size_t index = 0;
  std::string before;
  std::string after;
  friend bool operator==(const TokenChange&, const TokenChange&) = default;
};

struct NormalizedTweet {
  TokenSequence tokens;
  NormMode applied_mode = NormMode::soft;
  std::vector<TokenChange> change_log;  // ascending index, one entry per changed token
  std::size_t unknown_emoji = 0;        // emoji tokens with no alias in the table

  std::string joined() const { return tokens.joined(); }
};

/// Lexical normalization dictionary: case-folded variant -> canonical form.
struct LexNormDict {
  std::string provenance;
  StringMap<std::string> entries;
  std::size_t duplicate_keys = 0;
  std::size_t malformed_lines = 0;

  const std::string* find(std::string_view token) const;
  std::size_t size() const noexcept { return entries.size(); }
};

// `variant<TAB>canonical` per line, `#` comments allowed. Later duplicates win.
LexNormDict parse_lexnorm_dict(std::istream& in, std::string provenance);
LexNormDict load_lexnorm_dict(const std::filesystem::path& path);

/// Mentions -> @USER, urls -> HTTPURL, emoji -> alias. Token count and classes
/// are preserved; unknown emoji are kept and counted.
NormalizedTweet soft_normalize(const TokenSequence& tokens,
                               const EmojiTable& emoji = EmojiTable::builtin());

/// Dictionary pass over word-class tokens; the first dictionary in the chain
/// that knows a token wins. Input is treated as already soft-normalized.
NormalizedTweet hard_normalize(const TokenSequence& tokens, std::span<const LexNormDict> chain);

/// soft, or soft followed by hard, with a merged change log.
NormalizedTweet normalize(const TokenSequence& tokens, NormMode mode,
                          const EmojiTable& emoji = EmojiTable::builtin(),
                          std::span<const LexNormDict> chain = {});

// Re-applies a change log to the original token texts.
std::vector<std::string> replay_changes(const TokenSequence& original,
                                        std::span<const TokenChange> log);

}  // namespace tweetforge
