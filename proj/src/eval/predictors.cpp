#include "tweetforge/eval/predictors.hpp"

#include <map>

namespace tweetforge::eval {

namespace {

// Highest count, then smallest key.
std::string argmax(const std::map<std::string, std::size_t>& counts) {
  const std::string* best = nullptr;
  std::size_t n = 0;
  for (const auto& [k, c] : counts) {
    if (!best || c > n) {
      best = &k;
      n = c;
    }
  }
  return best ? *best : std::string();
}

}  // namespace

MftTagger MftTagger::train(std::span<const TaggedSequence> train_set) {
  StringMap<std::map<std::string, std::size_t>> per_token;
  std::map<std::string, std::size_t> global;
  for (const auto& s : train_set) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++per_token[s.tokens[i]][s.tags[i]];
      ++global[s.tags[i]];
    }
  }
  if (global.empty()) throw ConfigError("cannot train a tagger on an empty training set");
  MftTagger t;
  t.fallback_ = argmax(global);
  for (const auto& [tok, counts] : per_token) t.best_.emplace(tok, argmax(counts));
  return t;
}

std::string MftTagger::predict_token(const std::string& token) const {
  auto it = best_.find(token);
  return it == best_.end() ? fallback_ : it->second;
}

TaggedSequence MftTagger::predict(const std::vector<std::string>& tokens) const {
  TaggedSequence out;
  out.tokens = tokens;
  for (const auto& t : tokens) out.tags.push_back(predict_token(t));
  return out;
}

std::vector<TaggedSequence> MftTagger::predict(std::span<const TaggedSequence> sentences) const {
  std::vector<TaggedSequence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(predict(s.tokens));
  return out;
}

MajorityLabel MajorityLabel::train(std::span<const std::string> labels) {
  if (labels.empty()) throw ConfigError("cannot train a classifier on an empty training set");
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  MajorityLabel m;
  m.label_ = argmax(counts);
  return m;
}

}  // namespace tweetforge::eval
