#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tweetforge/eval/conll.hpp"
#include "tweetforge/tokenize.hpp"

namespace tweetforge::eval {

struct MetricReport {
  std::string task;
  std::map<std::string, double> metrics;
  std::uint64_t n_items = 0;
  std::int64_t run_seed = 0;
  std::vector<std::string> warnings;
  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Token class -> tag for positions a regular expression can tag perfectly.
using RegexTagMap = std::map<TokenClass, std::string>;
RegexTagMap default_regex_tags();  // rt_marker RT, mention USR, hashtag HT, url URL

std::vector<std::optional<std::string>> regex_tag(std::span<const std::string> tokens,
                                                  const RegexTagMap& mapping = default_regex_tags());

/// Token accuracy. With `regex_override`, predictions at regex-taggable
/// positions are replaced by the regex tag first.
MetricReport pos_accuracy(std::span<const TaggedSequence> gold, std::span<const TaggedSequence> pred,
                          bool regex_override, const RegexTagMap& mapping = default_regex_tags());

struct EntitySpan {
  std::size_t sentence_index = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string type;
  std::string surface;  // tokens [start, end) joined by single spaces
  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

std::vector<EntitySpan> extract_spans(const TaggedSequence& seq, std::size_t sentence_index = 0);
std::vector<EntitySpan> extract_spans(std::span<const TaggedSequence> corpus);
// BIO tags for `n` tokens rendering the given spans of one sentence.
std::vector<std::string> tags_from_spans(std::size_t n, std::span<const EntitySpan> spans);

enum class NerLevel { entity, surface };
std::optional<NerLevel> parse_ner_level(std::string_view s) noexcept;

/// Entity level: multiset match on (sentence, start, end, type). Surface level:
/// corpus-wide sets of (surface, type). precision/recall/f1, 0 on empty denominators.
MetricReport ner_f1(std::span<const EntitySpan> gold, std::span<const EntitySpan> pred, NerLevel level);

enum class ClassScheme { semeval17, semeval18 };
std::optional<ClassScheme> parse_class_scheme(std::string_view s) noexcept;
std::vector<std::string> scheme_labels(ClassScheme scheme);

/// semeval17: avg_rec, f1_np, accuracy. semeval18: f1_pos (ironic), accuracy.
/// A class without gold instances has recall 0 and adds a warning.
MetricReport classification_metrics(std::span<const std::string> gold,
                                    std::span<const std::string> pred, ClassScheme scheme);

// Harmonic mean with the 0 convention.
double f1_score(double precision, double recall) noexcept;

}  // namespace tweetforge::eval
