#include "tweetforge/normalize.hpp"

#include <fstream>

#include "tweetforge/utf8.hpp"

namespace tweetforge {

std::string_view to_string(NormMode m) noexcept { return m == NormMode::soft ? "soft" : "hard"; }

const std::string* LexNormDict::find(std::string_view token) const {
  const std::string key = utf8::fold_case(token);
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

LexNormDict parse_lexnorm_dict(std::istream& in, std::string provenance) {
  LexNormDict dict;
  dict.provenance = std::move(provenance);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      ++dict.malformed_lines;
      continue;
    }
    std::string canonical = line.substr(tab + 1);
    bool blank = canonical.empty();
    for (char c : canonical) blank = blank || is_ascii_space(c);
    const std::string_view variant = std::string_view(line).substr(0, tab);
    bool variant_ws = false;
    for (char c : variant) variant_ws = variant_ws || is_ascii_space(c);
    if (blank || variant_ws) {
      ++dict.malformed_lines;
      continue;
    }
    auto [it, inserted] = dict.entries.insert_or_assign(utf8::fold_case(variant), std::move(canonical));
    if (!inserted) ++dict.duplicate_keys;
  }
  return dict;
}

LexNormDict load_lexnorm_dict(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexical normalization dictionary " + path.string());
  return parse_lexnorm_dict(in, path.filename().string());
}

NormalizedTweet soft_normalize(const TokenSequence& tokens, const EmojiTable& emoji) {
  NormalizedTweet out;
  out.tokens = tokens;
  out.applied_mode = NormMode::soft;
  for (std::size_t i = 0; i < out.tokens.tokens.size(); ++i) {
    Token& tok = out.tokens.tokens[i];
    const std::string* replacement = nullptr;
    std::string alias_storage;
    switch (tok.cls) {
      case TokenClass::mention:
        alias_storage = kUserToken;
        replacement = &alias_storage;
        break;
      case TokenClass::url:
        alias_storage = kUrlToken;
        replacement = &alias_storage;
        break;
      case TokenClass::emoji:
        if (emoji.is_alias(tok.text)) break;
        replacement = emoji.alias(tok.text);
        if (replacement == nullptr) ++out.unknown_emoji;
        break;
      default:
        break;
    }
    if (replacement == nullptr || *replacement == tok.text) continue;
    out.change_log.push_back(TokenChange{i, tok.text, *replacement});
    tok.text = *replacement;
  }
  return out;
}

NormalizedTweet hard_normalize(const TokenSequence& tokens, std::span<const LexNormDict> chain) {
  NormalizedTweet out;
  out.tokens = tokens;
  out.applied_mode = NormMode::hard;
  for (std::size_t i = 0; i < out.tokens.tokens.size(); ++i) {
    Token& tok = out.tokens.tokens[i];
    if (tok.cls != TokenClass::word || tok.text == kUserToken || tok.text == kUrlToken) continue;
    for (const auto& dict : chain) {
      if (const std::string* canonical = dict.find(tok.text)) {
        if (*canonical != tok.text) {
          out.change_log.push_back(TokenChange{i, tok.text, *canonical});
          tok.text = *canonical;
        }
        break;
      }
    }
  }
  return out;
}

NormalizedTweet normalize(const TokenSequence& tokens, NormMode mode, const EmojiTable& emoji,
                          std::span<const LexNormDict> chain) {
  NormalizedTweet soft = soft_normalize(tokens, emoji);
  if (mode == NormMode::soft) return soft;
  NormalizedTweet hard = hard_normalize(soft.tokens, chain);
  // Soft rewrites non-word classes and hard rewrites word-class tokens only, so the
  // two logs touch disjoint indices.
  std::vector<TokenChange> merged;
  merged.reserve(soft.change_log.size() + hard.change_log.size());
  std::size_t a = 0, b = 0;
  while (a < soft.change_log.size() || b < hard.change_log.size()) {
    if (b == hard.change_log.size() ||
        (a < soft.change_log.size() && soft.change_log[a].index < hard.change_log[b].index)) {
      merged.push_back(std::move(soft.change_log[a++]));
    } else {
      merged.push_back(std::move(hard.change_log[b++]));
    }
  }
  hard.change_log = std::move(merged);
  hard.unknown_emoji = soft.unknown_emoji;
  return hard;
}

std::vector<std::string> replay_changes(const TokenSequence& original,
                                        std::span<const TokenChange> log) {
  std::vector<std::string> out = original.texts();
  for (const auto& c : log) out.at(c.index) = c.after;
  return out;
}

}  // namespace tweetforge
