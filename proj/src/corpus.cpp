#include "tweetforge/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>
#include <omp.h>

#include "tweetforge/bpe.hpp"
#include "tweetforge/utf8.hpp"

namespace tweetforge {

namespace {

constexpr std::string_view kReasonNames[] = {"retweet", "language", "too_short", "too_long",
                                             "keyword"};

bool json_flag(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  return it != obj.end() && it->is_boolean() && it->get<bool>();
}

std::optional<std::string> json_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  return out;
}

}  // namespace

std::optional<IngestFormat> parse_ingest_format(std::string_view s) noexcept {
  if (s == "jsonl") return IngestFormat::jsonl;
  if (s == "text") return IngestFormat::text;
  return std::nullopt;
}

bool is_text_retweet(const TokenSequence& tokens) noexcept {
  return tokens.size() >= 2 && tokens.tokens[0].cls == TokenClass::rt_marker &&
         tokens.tokens[1].cls == TokenClass::mention;
}

bool is_text_retweet(std::string_view text, const TweetTokenizer& tokenizer) {
  const auto head = tokenizer.tokenize_prefix(text, 2);
  return head.size() == 2 && head[0].cls == TokenClass::rt_marker &&
         head[1].cls == TokenClass::mention;
}

RawTweet make_tweet(std::string id, std::string text, std::optional<std::string> lang_hint,
                    bool metadata_retweet, const TweetTokenizer& tokenizer) {
  RawTweet t{std::move(id), std::move(text), std::move(lang_hint), std::nullopt, false};
  t.is_retweet = metadata_retweet || is_text_retweet(t.text, tokenizer);
  return t;
}

TweetReader::TweetReader(std::istream& in, IngestFormat format, const TweetTokenizer& tokenizer)
    : in_(&in), format_(format), tokenizer_(tokenizer) {}

std::optional<RawTweet> TweetReader::parse_json(std::string_view line) {
  auto obj = nlohmann::json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
  RawTweet t;
  auto id = obj.find("id");
  if (id == obj.end()) return std::nullopt;
  if (id->is_string()) {
    t.id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    t.id = id->dump();
  } else {
    return std::nullopt;
  }
  auto text = json_string(obj, "text");
  if (t.id.empty() || !text || !utf8::is_valid(*text)) return std::nullopt;
  t.text = std::move(*text);
  t.lang_hint = json_string(obj, "lang");
  t.timestamp = json_string(obj, "created_at");
  if (!t.timestamp) t.timestamp = json_string(obj, "timestamp");
  auto rs = obj.find("retweeted_status");
  const bool meta = json_flag(obj, "retweet") || json_flag(obj, "is_retweet") ||
                    (rs != obj.end() && !rs->is_null());
  t.is_retweet = meta || is_text_retweet(t.text, tokenizer_);
  return t;
}

std::optional<RawTweet> TweetReader::next() {
  while (std::getline(*in_, line_)) {
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    if (std::all_of(line_.begin(), line_.end(), is_ascii_space)) continue;
    if (format_ == IngestFormat::text) {
      if (!utf8::is_valid(line_)) {
        ++malformed_;
        continue;
      }
      return make_tweet(std::to_string(line_no_), line_, std::nullopt, false, tokenizer_);
    }
    if (auto t = parse_json(line_)) return t;
    ++malformed_;
  }
  if (in_->bad()) throw IoError("read error after line " + std::to_string(line_no_));
  return std::nullopt;
}

ReadResult read_tweets(std::istream& in, IngestFormat format) {
  TweetTokenizer tokenizer;
  TweetReader reader(in, format, tokenizer);
  ReadResult r;
  while (auto t = reader.next()) r.tweets.push_back(std::move(*t));
  r.malformed = reader.malformed();
  return r;
}

void write_tweet(std::ostream& out, const RawTweet& tweet, IngestFormat format) {
  if (format == IngestFormat::text) {
    out << tweet.text << '\n';
    return;
  }
  nlohmann::ordered_json j;
  j["id"] = tweet.id;
  j["text"] = tweet.text;
  if (tweet.lang_hint) j["lang"] = *tweet.lang_hint;
  if (tweet.timestamp) j["created_at"] = *tweet.timestamp;
  if (tweet.is_retweet) j["retweet"] = true;
  out << j.dump() << '\n';
}

void FilterConfig::validate() const {
  if (min_tokens < 1) throw ConfigError("min_tokens must be at least 1");
  if (min_tokens > max_tokens) throw ConfigError("min_tokens must not exceed max_tokens");
  if (lang_min_confidence < 0.0 || lang_min_confidence > 1.0)
    throw ConfigError("lang_min_confidence must be within [0, 1]");
  if (keywords) {
    for (const auto& k : *keywords) {
      if (k.empty()) throw ConfigError("keyword list contains an empty keyword");
      if (k != to_lower_ascii(k)) throw ConfigError("keyword '" + k + "' must be lowercase");
    }
  }
}

std::string_view to_string(DropReason r) noexcept {
  return kReasonNames[static_cast<std::size_t>(r)];
}

void CorpusStats::merge(const CorpusStats& o) {
  tweets_in += o.tweets_in;
  tweets_kept += o.tweets_kept;
  tokens_total += o.tokens_total;
  if (o.subwords_total) subwords_total = subwords_total.value_or(0) + *o.subwords_total;
  for (const auto& [k, v] : o.drop_reasons) drop_reasons[k] += v;
  malformed_records += o.malformed_records;
}

std::uint64_t CorpusStats::dropped() const noexcept {
  std::uint64_t n = 0;
  for (const auto& [k, v] : drop_reasons) n += v;
  return n;
}

void CorpusStats::write_report(std::ostream& out) const {
  out << "tweets_in=" << tweets_in << '\n'
      << "tweets_kept=" << tweets_kept << '\n'
      << "tokens_total=" << tokens_total << '\n';
  if (subwords_total) out << "subwords_total=" << *subwords_total << '\n';
  out << "malformed_records=" << malformed_records << '\n';
  for (auto name : kReasonNames) {
    auto it = drop_reasons.find(std::string(name));
    out << "dropped." << name << '=' << (it == drop_reasons.end() ? 0 : it->second) << '\n';
  }
}

CorpusFilter::CorpusFilter(FilterConfig cfg, const TweetTokenizer& tokenizer,
                           const LanguageIdentifier& langid)
    : cfg_(std::move(cfg)), tokenizer_(tokenizer), langid_(&langid) {
  cfg_.validate();
}

CorpusFilter::Decision CorpusFilter::check(const RawTweet& tweet) const {
  const TokenSequence tokens = tokenizer_.tokenize(tweet.text);
  Decision d;
  d.tokens = tokens.size();
  if (cfg_.drop_retweets && (tweet.is_retweet || is_text_retweet(tokens))) {
    d.drop = DropReason::retweet;
    return d;
  }
  if (!cfg_.target_lang.empty()) {
    std::string lang_text;
    for (const auto& t : tokens.tokens) {
      if (t.cls != TokenClass::word && t.cls != TokenClass::hashtag) continue;
      if (!lang_text.empty()) lang_text.push_back(' ');
      lang_text += t.cls == TokenClass::hashtag ? std::string_view(t.text).substr(1) : t.text;
    }
    std::optional<std::string_view> hint;
    if (tweet.lang_hint) hint = *tweet.lang_hint;
    const LangScore score = identify_language(lang_text, *langid_, hint);
    if (score.lang != cfg_.target_lang || score.confidence < cfg_.lang_min_confidence) {
      d.drop = DropReason::language;
      return d;
    }
  }
  if (d.tokens < cfg_.min_tokens) {
    d.drop = DropReason::too_short;
  } else if (d.tokens > cfg_.max_tokens) {
    d.drop = DropReason::too_long;
  } else if (cfg_.keywords) {
    const std::string lower = utf8::fold_case(tweet.text);
    const bool hit = std::any_of(cfg_.keywords->begin(), cfg_.keywords->end(),
                                 [&](const std::string& k) { return lower.find(k) != std::string::npos; });
    if (!hit) d.drop = DropReason::keyword;
  }
  return d;
}

namespace {

FilterResult gather(std::span<const RawTweet> tweets,
                    const std::vector<CorpusFilter::Decision>& decisions) {
  FilterResult r;
  r.stats.tweets_in = tweets.size();
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const auto& d = decisions[i];
    if (d.drop) {
      ++r.stats.drop_reasons[std::string(to_string(*d.drop))];
    } else {
      r.kept.push_back(tweets[i]);
      r.stats.tokens_total += d.tokens;
    }
  }
  r.stats.tweets_kept = r.kept.size();
  return r;
}

}  // namespace

FilterResult filter_corpus_serial(std::span<const RawTweet> tweets, const CorpusFilter& filter) {
  std::vector<CorpusFilter::Decision> decisions;
  decisions.reserve(tweets.size());
  for (const auto& t : tweets) decisions.push_back(filter.check(t));
  return gather(tweets, decisions);
}

FilterResult filter_corpus(std::span<const RawTweet> tweets, const CorpusFilter& filter,
                           int workers) {
  if (workers <= 1) return filter_corpus_serial(tweets, filter);
  std::vector<CorpusFilter::Decision> decisions(tweets.size());
  const auto n = static_cast<std::ptrdiff_t>(tweets.size());
#pragma omp parallel for num_threads(workers) schedule(dynamic, 256)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    decisions[static_cast<std::size_t>(i)] = filter.check(tweets[static_cast<std::size_t>(i)]);
  return gather(tweets, decisions);
}

CorpusStats corpus_stats(std::span<const RawTweet> tweets, const TweetTokenizer& tokenizer,
                         const MergeTable* bpe, bool pretokenized, int workers) {
  const auto n = static_cast<std::ptrdiff_t>(tweets.size());
  std::uint64_t tokens = 0;
  std::uint64_t subwords = 0;
#pragma omp parallel num_threads(std::max(workers, 1)) reduction(+ : tokens, subwords)
  {
    std::optional<BpeEncoder> encoder;
    if (bpe) encoder.emplace(*bpe);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& text = tweets[static_cast<std::size_t>(i)].text;
      if (!encoder) {
        std::size_t c = 0;
        if (pretokenized) {
          for_each_field(text, [&](std::string_view) { ++c; });
        } else {
          c = tokenizer.count_tokens(text);
        }
        tokens += c;
        continue;
      }
      TokenSequence seq = pretokenized ? split_pretokenized(text, tokenizer) : tokenizer.tokenize(text);
      tokens += seq.size();
      SubwordSequence out;
      for (const auto& t : seq.tokens) encoder->encode_word(t.text, out);
      subwords += out.size();
    }
  }
  CorpusStats s;
  s.tweets_in = tweets.size();
  s.tweets_kept = tweets.size();
  s.tokens_total = tokens;
  if (bpe) s.subwords_total = subwords;
  return s;
}

}  // namespace tweetforge
