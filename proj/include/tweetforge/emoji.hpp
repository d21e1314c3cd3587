#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>

#include "tweetforge/common.hpp"

namespace tweetforge {

/// Emoji codepoint sequences mapped to text aliases of the form ":snake_case_name:".
///
/// Lookups are longest-sequence-first. The built-in table is a snapshot of the
/// `emoji` package's English names and is compiled into the library.
class EmojiTable {
 public:
  /// Parses `hex-codepoints<TAB>alias` lines. Blank lines and `#` comments are
  /// ignored; malformed lines are skipped and counted.
  static EmojiTable parse(std::istream& in);
  static EmojiTable load(const std::filesystem::path& path);
  static const EmojiTable& builtin();

  /// Returns false (and leaves the table unchanged) for empty sequences or
  /// aliases that are empty or contain whitespace.
  bool insert(std::string emoji_utf8, std::string alias);

  /// Byte length of the longest table entry starting at `pos`, or 0.
  std::size_t match(std::string_view text, std::size_t pos) const;

  const std::string* alias(std::string_view emoji) const;
  bool is_alias(std::string_view text) const { return aliases_.find(text) != aliases_.end(); }

  std::size_t size() const noexcept { return by_emoji_.size(); }
  std::size_t malformed_lines() const noexcept { return malformed_; }

 private:
  StringMap<std::string> by_emoji_;
  StringSet aliases_;
  std::unordered_set<char32_t> first_codepoints_;
  std::size_t max_codepoints_ = 0;
  std::size_t malformed_ = 0;
};

// Codepoints that render as pictographs even when absent from any table.
bool is_pictographic(char32_t cp) noexcept;

// Modifiers and joiners that attach to a preceding pictograph.
bool is_emoji_component(char32_t cp) noexcept;

// Longest pictographic cluster at `pos` (base + modifiers, ZWJ chains,
// regional-indicator pairs), or 0.
std::size_t match_pictographic_cluster(std::string_view text, std::size_t pos) noexcept;

}  // namespace tweetforge
