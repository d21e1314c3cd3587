#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tweetforge::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
  char32_t cp = kReplacement;
  std::size_t len = 1;
  bool valid = false;
};

// Decodes the scalar value starting at byte `pos`. Invalid or truncated
// sequences decode as U+FFFD with length 1 so callers always make progress.
Decoded decode(std::string_view s, std::size_t pos) noexcept;

bool is_valid(std::string_view s) noexcept;

void append(std::string& out, char32_t cp);

std::size_t count_codepoints(std::string_view s) noexcept;

// One view per scalar value (invalid bytes are returned as single-byte views).
std::vector<std::string_view> split_codepoints(std::string_view s);

// Whitespace, control characters and zero-width spaces.
bool is_space(char32_t cp) noexcept;

// ASCII punctuation/symbols plus the common Unicode punctuation and symbol blocks.
bool is_punct(char32_t cp) noexcept;

// Simple case folding: ASCII, Latin-1, Latin Extended-A pairs, Greek and
// Cyrillic capitals. Other scalars are copied unchanged.
std::string fold_case(std::string_view s);

char32_t fold_codepoint(char32_t cp) noexcept;

}  // namespace tweetforge::utf8
