#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetforge/common.hpp"
#include "tweetforge/langid.hpp"
#include "tweetforge/tokenize.hpp"

namespace tweetforge {

class MergeTable;

struct RawTweet {
  std::string id;
  std::string text;
  std::optional<std::string> lang_hint;
  std::optional<std::string> timestamp;
  bool is_retweet = false;
  friend bool operator==(const RawTweet&, const RawTweet&) = default;
};

enum class IngestFormat { jsonl, text };

std::optional<IngestFormat> parse_ingest_format(std::string_view s) noexcept;

/// True when the first token is the literal "RT" and the second a mention.
bool is_text_retweet(const TokenSequence& tokens) noexcept;
bool is_text_retweet(std::string_view text, const TweetTokenizer& tokenizer);

// Builds a tweet the way the reader would, applying the retweet rule.
RawTweet make_tweet(std::string id, std::string text, std::optional<std::string> lang_hint = {},
                    bool metadata_retweet = false,
                    const TweetTokenizer& tokenizer = TweetTokenizer());

/// Lazy tweet stream over line-delimited input.
///
/// jsonl records are objects with a string (or integer) "id", a string "text",
/// optional "lang" and "created_at"/"timestamp", and any of "retweet",
/// "is_retweet" (true) or a non-null "retweeted_status" as the retweet flag.
/// In text mode every non-blank line is a tweet whose id is its line number.
/// Malformed records are counted and skipped; blank lines are ignored.
class TweetReader {
 public:
  TweetReader(std::istream& in, IngestFormat format,
              const TweetTokenizer& tokenizer = TweetTokenizer());

  std::optional<RawTweet> next();

  std::size_t malformed() const noexcept { return malformed_; }
  std::size_t lines() const noexcept { return line_no_; }

 private:
  std::optional<RawTweet> parse_json(std::string_view line);

  std::istream* in_;
  IngestFormat format_;
  TweetTokenizer tokenizer_;
  std::string line_;
  std::size_t line_no_ = 0;
  std::size_t malformed_ = 0;
};

struct ReadResult {
  std::vector<RawTweet> tweets;
  std::size_t malformed = 0;
};
ReadResult read_tweets(std::istream& in, IngestFormat format);

void write_tweet(std::ostream& out, const RawTweet& tweet, IngestFormat format);

struct FilterConfig {
  std::size_t min_tokens = 10;
  std::size_t max_tokens = 64;
  std::string target_lang = "en";  // empty disables the language filter
  bool drop_retweets = true;
  std::optional<std::vector<std::string>> keywords;  // lowercase substrings
  double lang_min_confidence = 0.0;

  void validate() const;  // throws ConfigError
};

enum class DropReason { retweet, language, too_short, too_long, keyword };
std::string_view to_string(DropReason r) noexcept;

struct CorpusStats {
  std::uint64_t tweets_in = 0;
  std::uint64_t tweets_kept = 0;
  std::uint64_t tokens_total = 0;
  std::optional<std::uint64_t> subwords_total;
  std::map<std::string, std::uint64_t> drop_reasons;
  std::uint64_t malformed_records = 0;  // reader skips; not part of tweets_in

  // Associative and commutative.
  void merge(const CorpusStats& other);
  std::uint64_t dropped() const noexcept;
  // key=value lines in fixed order.
  void write_report(std::ostream& out) const;
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// Per-tweet filter decision. Checks run in the order retweet, language,
/// token bounds, keyword; the first failing check names the drop reason.
/// Token counts come from tokenizing the raw text. Language identification
/// sees only the word and hashtag tokens, so handles and links carry no weight.
class CorpusFilter {
 public:
  CorpusFilter(FilterConfig cfg, const TweetTokenizer& tokenizer,
               const LanguageIdentifier& langid);

  struct Decision {
    std::optional<DropReason> drop;
    std::size_t tokens = 0;
  };
  Decision check(const RawTweet& tweet) const;
  const FilterConfig& config() const noexcept { return cfg_; }

 private:
  FilterConfig cfg_;
  TweetTokenizer tokenizer_;
  const LanguageIdentifier* langid_;
};

struct FilterResult {
  std::vector<RawTweet> kept;  // input order
  CorpusStats stats;           // tokens_total counts kept tweets only
};

FilterResult filter_corpus(std::span<const RawTweet> tweets, const CorpusFilter& filter,
                           int workers = 1);
FilterResult filter_corpus_serial(std::span<const RawTweet> tweets, const CorpusFilter& filter);

/// Token and (when `bpe` is given) subword totals. `pretokenized` treats the
/// text as whitespace-separated tokens, as written by the normalize stage.
CorpusStats corpus_stats(std::span<const RawTweet> tweets, const TweetTokenizer& tokenizer,
                         const MergeTable* bpe = nullptr, bool pretokenized = false,
                         int workers = 1);

}  // namespace tweetforge
