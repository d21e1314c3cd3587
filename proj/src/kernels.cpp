#include "tweetforge/kernels.hpp"

#include "tweetforge/normalize.hpp"
#include "tweetforge/tokenize.hpp"

namespace tweetforge {

namespace {

SubwordSequence encode_line(std::string_view line, BpeEncoder& enc) {
  SubwordSequence out;
  for_each_field(line, [&](std::string_view w) { enc.encode_word(w, out); });
  return out;
}

std::vector<std::uint32_t> encode_raw(std::string_view text, const TweetTokenizer& tok,
                                      const EmojiTable& emoji, BpeEncoder& enc) {
  const NormalizedTweet norm = soft_normalize(tok.tokenize(text), emoji);
  SubwordSequence out;
  for (const auto& t : norm.tokens.tokens) enc.encode_word(t.text, out);
  return std::move(out.ids);
}

}  // namespace

std::vector<SubwordSequence> encode_lines_serial(std::span<const std::string> lines,
                                                 const MergeTable& table) {
  BpeEncoder enc(table);
  std::vector<SubwordSequence> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(encode_line(l, enc));
  return out;
}

std::vector<SubwordSequence> encode_lines(std::span<const std::string> lines, const MergeTable& table,
                                          int workers) {
  if (workers <= 1) return encode_lines_serial(lines, table);
  std::vector<SubwordSequence> out(lines.size());
  const auto n = static_cast<std::ptrdiff_t>(lines.size());
#pragma omp parallel num_threads(workers)
  {
    BpeEncoder enc(table);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = encode_line(lines[static_cast<std::size_t>(i)], enc);
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> encode_raw_tweets_serial(std::span<const std::string> texts,
                                                                 const MergeTable& table,
                                                                 const EmojiTable& emoji) {
  const TweetTokenizer tok(emoji);
  BpeEncoder enc(table);
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(encode_raw(t, tok, emoji, enc));
  return out;
}

std::vector<std::vector<std::uint32_t>> encode_raw_tweets(std::span<const std::string> texts,
                                                          const MergeTable& table,
                                                          const EmojiTable& emoji, int workers) {
  if (workers <= 1) return encode_raw_tweets_serial(texts, table, emoji);
  const TweetTokenizer tok(emoji);
  std::vector<std::vector<std::uint32_t>> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel num_threads(workers)
  {
    BpeEncoder enc(table);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = encode_raw(texts[static_cast<std::size_t>(i)], tok, emoji, enc);
  }
  return out;
}

}  // namespace tweetforge
