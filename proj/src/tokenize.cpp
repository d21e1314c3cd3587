#include "tweetforge/tokenize.hpp"

#include <algorithm>
#include <array>

#include "tweetforge/utf8.hpp"

namespace tweetforge {

namespace {

constexpr std::array<std::string_view, 9> kClassNames = {
    "word", "mention", "url", "hashtag", "emoji", "rt_marker", "punct", "emoticon", "number"};

// Longest first so that the first hit is the longest emoticon.
constexpr std::array<std::string_view, 51> kEmoticons = {
    ">:(", ">:)", ":-)", ":-(", ";-)", ";-(", ":-D", ":-P", ":-p", ":-/", ":-O", ":-o", ":-*",
    ":-|", ":'(", ":')", "</3", "^_^", "-_-", "o_O", "O_o", "T_T", ":)",  ":(",  ";)",  ":D",
    ";D",  ":P",  ":p",  ";P",  ";p",  ":/",  ":\\", ":O",  ":o",  ":*",  ":|",  ":]",  ":[",
    ":}",  ":{",  "=)",  "=(",  "=D",  "=]",  "<3",  "^^",  "xD",  "XD",  ":$",  ";]"};

bool is_space_cp(char32_t cp) noexcept { return utf8::is_space(cp); }

bool is_punct_cp(char32_t cp) noexcept { return utf8::is_punct(cp); }

bool is_word_cp(char32_t cp) noexcept {
  return !is_space_cp(cp) && !is_punct_cp(cp) && !is_pictographic(cp);
}

bool is_mark_like(char32_t cp) noexcept {
  return (cp >= 0x300 && cp <= 0x36F) || (cp >= 0x20D0 && cp <= 0x20FF) ||
         (cp >= 0xFE00 && cp <= 0xFE0F) || cp == 0x200C || cp == 0x200D ||
         (cp >= 0xE0020 && cp <= 0xE007F);
}

bool is_ident_byte(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_ascii_alnum(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_ascii_digit(char c) noexcept { return c >= '0' && c <= '9'; }

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) noexcept {
  if (text.size() - pos < prefix.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    char c = text[pos + k];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    if (c != prefix[k]) return false;
  }
  return true;
}

std::size_t match_url(std::string_view text, std::size_t pos) noexcept {
  if (!starts_with_ci(text, pos, "http://") && !starts_with_ci(text, pos, "https://") &&
      !starts_with_ci(text, pos, "www.")) {
    return 0;
  }
  std::size_t i = pos;
  while (i < text.size()) {
    const auto d = utf8::decode(text, i);
    if (is_space_cp(d.cp) && d.valid) break;
    i += d.len;
  }
  return i - pos;
}

std::size_t match_mention(std::string_view text, std::size_t pos) noexcept {
  if (text[pos] != '@') return 0;
  std::size_t i = pos + 1;
  while (i < text.size() && is_ident_byte(text[i])) ++i;
  const std::size_t n = i - pos - 1;
  return (n >= 1 && n <= 15) ? i - pos : 0;
}

std::size_t match_hashtag(std::string_view text, std::size_t pos) noexcept {
  if (text[pos] != '#' || pos + 1 >= text.size()) return 0;
  auto d = utf8::decode(text, pos + 1);
  const bool letter = d.cp < 0x80 ? ((d.cp | 0x20) >= 'a' && (d.cp | 0x20) <= 'z')
                                  : (is_word_cp(d.cp) && !is_mark_like(d.cp));
  if (!letter) return 0;
  std::size_t i = pos + 1 + d.len;
  while (i < text.size()) {
    d = utf8::decode(text, i);
    const bool ok = d.cp < 0x80 ? is_ident_byte(static_cast<char>(d.cp)) : is_word_cp(d.cp);
    if (!ok) break;
    i += d.len;
  }
  return i - pos;
}

// Bytes that can start an emoticon; most positions fail this one lookup.
constexpr auto kEmoticonStart = [] {
  std::array<bool, 256> t{};
  for (std::string_view e : kEmoticons) t[static_cast<unsigned char>(e.front())] = true;
  return t;
}();

std::size_t match_emoticon(std::string_view text, std::size_t pos) noexcept {
  if (pos >= text.size() || !kEmoticonStart[static_cast<unsigned char>(text[pos])]) return 0;
  const std::string_view rest = text.substr(pos);
  for (std::string_view e : kEmoticons) {
    if (rest.size() < e.size() || rest.compare(0, e.size(), e) != 0) continue;
    if (is_ascii_alnum(e.back()) && rest.size() > e.size() && is_ascii_alnum(rest[e.size()])) {
      continue;
    }
    return e.size();
  }
  return 0;
}

bool is_numeric(std::string_view run) noexcept {
  if (run.empty() || !is_ascii_digit(run.front()) || !is_ascii_digit(run.back())) return false;
  return std::all_of(run.begin(), run.end(),
                     [](char c) { return is_ascii_digit(c) || c == '.' || c == ','; });
}

std::size_t match_word_run(std::string_view text, std::size_t pos) noexcept {
  std::size_t i = pos;
  char32_t prev = 0;
  while (i < text.size()) {
    const auto d = utf8::decode(text, i);
    if (is_word_cp(d.cp)) {
      prev = d.cp;
      i += d.len;
      continue;
    }
    if (i == pos || i + d.len >= text.size()) break;
    const auto next = utf8::decode(text, i + d.len);
    const bool joiner = (d.cp == '\'' || d.cp == 0x2019 || d.cp == '-') && is_word_cp(next.cp);
    const bool digit_sep = (d.cp == '.' || d.cp == ',') && prev < 0x80 &&
                           is_ascii_digit(static_cast<char>(prev)) && next.cp < 0x80 &&
                           is_ascii_digit(static_cast<char>(next.cp));
    if (!joiner && !digit_sep) break;
    prev = next.cp;
    i += d.len + next.len;
  }
  return i - pos;
}

}  // namespace

std::string_view to_string(TokenClass c) noexcept {
  return kClassNames[static_cast<std::size_t>(c)];
}

std::optional<TokenClass> parse_token_class(std::string_view s) noexcept {
  for (std::size_t k = 0; k < kClassNames.size(); ++k)
    if (kClassNames[k] == s) return static_cast<TokenClass>(k);
  return std::nullopt;
}

bool is_emoticon(std::string_view text) noexcept {
  return std::find(kEmoticons.begin(), kEmoticons.end(), text) != kEmoticons.end();
}

std::vector<std::string> TokenSequence::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

std::string TokenSequence::joined() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.text;
  }
  return out;
}

template <class Sink>
void TweetTokenizer::scan(std::string_view text, Sink&& sink) const {
  std::size_t index = 0;
  std::size_t pos = 0;

  // Tokens of higher precedence than punct; used to cut punct runs short.
  auto special_at = [&](std::size_t p) -> std::pair<std::size_t, TokenClass> {
    if (std::size_t n = match_url(text, p)) return {n, TokenClass::url};
    if (std::size_t n = match_mention(text, p)) return {n, TokenClass::mention};
    if (std::size_t n = match_hashtag(text, p)) return {n, TokenClass::hashtag};
    if (std::size_t n = emoji_->match(text, p)) return {n, TokenClass::emoji};
    if (std::size_t n = match_pictographic_cluster(text, p)) return {n, TokenClass::emoji};
    if (std::size_t n = match_emoticon(text, p)) return {n, TokenClass::emoticon};
    return {0, TokenClass::word};
  };

  while (pos < text.size()) {
    const auto d = utf8::decode(text, pos);
    if (d.valid && is_space_cp(d.cp)) {
      pos += d.len;
      continue;
    }
    auto [len, cls] = special_at(pos);
    if (len == 0 && is_word_cp(d.cp)) {
      len = match_word_run(text, pos);
      const std::string_view run = text.substr(pos, len);
      if (run == kUrlToken) {
        cls = TokenClass::url;
      } else if (index == 0 && run == "RT") {
        cls = TokenClass::rt_marker;
      } else if (is_numeric(run)) {
        cls = TokenClass::number;
      } else {
        cls = TokenClass::word;
      }
    } else if (len == 0) {
      cls = TokenClass::punct;
      len = d.len;
      while (pos + len < text.size()) {
        const auto next = utf8::decode(text, pos + len);
        if (next.cp != d.cp || next.len != d.len ||
            text.compare(pos + len, d.len, text, pos, d.len) != 0 ||
            special_at(pos + len).first != 0) {
          break;
        }
        len += next.len;
      }
    }
    if (!sink(Span{pos, pos + len}, cls)) return;
    ++index;
    pos += len;
  }
}

TokenSequence TweetTokenizer::tokenize(std::string_view text) const {
  TokenSequence seq;
  seq.source.assign(text);
  scan(text, [&](Span s, TokenClass c) {
    seq.tokens.push_back(Token{std::string(text.substr(s.start, s.end - s.start)), c, s});
    return true;
  });
  return seq;
}

std::vector<Token> TweetTokenizer::tokenize_prefix(std::string_view text,
                                                   std::size_t max_tokens) const {
  std::vector<Token> out;
  if (max_tokens == 0) return out;
  scan(text, [&](Span s, TokenClass c) {
    out.push_back(Token{std::string(text.substr(s.start, s.end - s.start)), c, s});
    return out.size() < max_tokens;
  });
  return out;
}

std::size_t TweetTokenizer::count_tokens(std::string_view text) const {
  std::size_t n = 0;
  scan(text, [&](Span, TokenClass) {
    ++n;
    return true;
  });
  return n;
}

TokenClass TweetTokenizer::classify(std::string_view text, bool sequence_start) const {
  if (!sequence_start && text == "RT") return TokenClass::word;
  std::size_t count = 0;
  Span first;
  TokenClass cls = TokenClass::word;
  scan(text, [&](Span s, TokenClass c) {
    if (count++ == 0) {
      first = s;
      cls = c;
    }
    return count < 2;
  });
  if (count == 1 && first.start == 0 && first.end == text.size()) return cls;
  return TokenClass::word;
}

TokenSequence tokenize(std::string_view text) { return TweetTokenizer().tokenize(text); }

TokenClass classify_token(std::string_view text, bool sequence_start) {
  return TweetTokenizer().classify(text, sequence_start);
}

TokenSequence split_pretokenized(std::string_view line, const TweetTokenizer& tokenizer) {
  TokenSequence seq;
  seq.source.assign(line);
  for_each_field(line, [&](std::string_view field) {
    const std::size_t start = static_cast<std::size_t>(field.data() - line.data());
    TokenClass cls = tokenizer.emoji_table().is_alias(field)
                         ? TokenClass::emoji
                         : tokenizer.classify(field, seq.tokens.empty());
    seq.tokens.push_back(Token{std::string(field), cls, Span{start, start + field.size()}});
  });
  return seq;
}

}  // namespace tweetforge
