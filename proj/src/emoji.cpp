#include "tweetforge/emoji.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tweetforge/utf8.hpp"

namespace tweetforge {

namespace embedded {
extern const std::string_view emoji_table;
}

namespace {

bool has_whitespace(std::string_view s) {
  for (char c : s)
    if (is_ascii_space(c)) return true;
  return false;
}

}  // namespace

EmojiTable EmojiTable::parse(std::istream& in) {
  EmojiTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      ++table.malformed_;
      continue;
    }
    std::string emoji;
    bool ok = true;
    for_each_field(std::string_view(line).substr(0, tab), [&](std::string_view hex) {
      unsigned long cp = 0;
      auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
      if (ec != std::errc() || p != hex.data() + hex.size() || cp > 0x10FFFF) {
        ok = false;
        return;
      }
      utf8::append(emoji, static_cast<char32_t>(cp));
    });
    if (!ok || !table.insert(std::move(emoji), line.substr(tab + 1))) ++table.malformed_;
  }
  return table;
}

EmojiTable EmojiTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open emoji table " + path.string());
  return parse(in);
}

const EmojiTable& EmojiTable::builtin() {
  static const EmojiTable table = [] {
    std::istringstream in{std::string(embedded::emoji_table)};
    return parse(in);
  }();
  return table;
}

bool EmojiTable::insert(std::string emoji_utf8, std::string alias) {
  if (emoji_utf8.empty() || alias.empty() || has_whitespace(alias)) return false;
  max_codepoints_ = std::max(max_codepoints_, utf8::count_codepoints(emoji_utf8));
  first_codepoints_.insert(utf8::decode(emoji_utf8, 0).cp);
  aliases_.insert(alias);
  by_emoji_.insert_or_assign(std::move(emoji_utf8), std::move(alias));
  return true;
}

std::size_t EmojiTable::match(std::string_view text, std::size_t pos) const {
  if (pos >= text.size()) return 0;
  const auto first = utf8::decode(text, pos);
  if (!first_codepoints_.contains(first.cp)) return 0;

  // Candidate end offsets, one per codepoint, longest tried first.
  std::size_t ends[32];
  std::size_t n = 0;
  std::size_t i = pos;
  while (i < text.size() && n < max_codepoints_ && n < 32) {
    i += utf8::decode(text, i).len;
    ends[n++] = i;
  }
  while (n > 0) {
    const std::size_t end = ends[--n];
    if (by_emoji_.find(text.substr(pos, end - pos)) != by_emoji_.end()) return end - pos;
  }
  return 0;
}

const std::string* EmojiTable::alias(std::string_view emoji) const {
  auto it = by_emoji_.find(emoji);
  return it == by_emoji_.end() ? nullptr : &it->second;
}

bool is_pictographic(char32_t cp) noexcept {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2300 && cp <= 0x23FF) || (cp >= 0x2B05 && cp <= 0x2B55);
}

bool is_emoji_component(char32_t cp) noexcept {
  return cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3 || (cp >= 0x1F3FB && cp <= 0x1F3FF) ||
         (cp >= 0xE0020 && cp <= 0xE007F);
}

std::size_t match_pictographic_cluster(std::string_view text, std::size_t pos) noexcept {
  if (pos >= text.size()) return 0;
  auto d = utf8::decode(text, pos);
  if (!d.valid || !is_pictographic(d.cp)) return 0;
  const bool regional = d.cp >= 0x1F1E6 && d.cp <= 0x1F1FF;
  std::size_t i = pos + d.len;
  if (regional && i < text.size()) {
    const auto next = utf8::decode(text, i);
    if (next.cp >= 0x1F1E6 && next.cp <= 0x1F1FF) return i + next.len - pos;
    return i - pos;
  }
  while (i < text.size()) {
    d = utf8::decode(text, i);
    if (is_emoji_component(d.cp)) {
      i += d.len;
    } else if (d.cp == 0x200D && i + d.len < text.size()) {
      const auto next = utf8::decode(text, i + d.len);
      if (!is_pictographic(next.cp)) break;
      i += d.len + next.len;
    } else {
      break;
    }
  }
  return i - pos;
}

}  // namespace tweetforge
