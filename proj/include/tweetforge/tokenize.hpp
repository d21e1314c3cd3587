#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tweetforge/emoji.hpp"

namespace tweetforge {

enum class TokenClass : std::uint8_t {
  word,
  mention,
  url,
  hashtag,
  emoji,
  rt_marker,
  punct,
  emoticon,
  number,
};

std::string_view to_string(TokenClass c) noexcept;
std::optional<TokenClass> parse_token_class(std::string_view s) noexcept;

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
  std::string text;
  TokenClass cls = TokenClass::word;
  Span span;  // byte offsets into the source
  friend bool operator==(const Token&, const Token&) = default;
};

struct TokenSequence {
  std::vector<Token> tokens;
  std::string source;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  std::vector<std::string> texts() const;
  // Token texts joined by single spaces.
  std::string joined() const;
};

inline constexpr std::string_view kUserToken = "@USER";
inline constexpr std::string_view kUrlToken = "HTTPURL";

/// Tweet-aware word tokenizer.
///
/// Grammar, tried at every position in precedence order:
///   url       http:// | https:// | www.  (ASCII case-insensitive), up to whitespace
///   mention   '@' + [A-Za-z0-9_]{1,15}, not followed by another identifier char
///   hashtag   '#' + letter + word chars
///   emoji     longest emoji-table match, else a pictographic cluster
///   emoticon  fixed list, not glued to a following alphanumeric
///   word run  letters/digits/'_' with internal apostrophes and hyphens; runs that
///             are "RT" at sequence start, numeric, or "HTTPURL" are re-classed
///   punct     run of one repeated character ("!!", "...")
/// Text is never rewritten: every token is a byte slice of the input.
class TweetTokenizer {
 public:
  TweetTokenizer() : TweetTokenizer(EmojiTable::builtin()) {}
  explicit TweetTokenizer(const EmojiTable& emoji) : emoji_(&emoji) {}

  TokenSequence tokenize(std::string_view text) const;

  // At most `max_tokens` leading tokens.
  std::vector<Token> tokenize_prefix(std::string_view text, std::size_t max_tokens) const;

  std::size_t count_tokens(std::string_view text) const;

  /// Class the tokenizer would assign to `text` when it appears as one token.
  /// "RT" is an rt_marker only when `sequence_start` is true.
  TokenClass classify(std::string_view text, bool sequence_start = true) const;

  const EmojiTable& emoji_table() const noexcept { return *emoji_; }

 private:
  template <class Sink>
  void scan(std::string_view text, Sink&& sink) const;

  const EmojiTable* emoji_;
};

TokenSequence tokenize(std::string_view text);
TokenClass classify_token(std::string_view text, bool sequence_start = true);

/// Splits already-tokenized text (tokens separated by whitespace). Classes come
/// from classify_token, except that emoji aliases are class emoji.
TokenSequence split_pretokenized(std::string_view line,
                                 const TweetTokenizer& tokenizer = TweetTokenizer());

bool is_emoticon(std::string_view text) noexcept;

}  // namespace tweetforge
