#pragma once

#include <span>
#include <string>
#include <vector>

#include "tweetforge/common.hpp"
#include "tweetforge/eval/conll.hpp"

namespace tweetforge::eval {

/// Most-frequent-tag baseline. Count ties go to the lexicographically smallest
/// tag; unseen tokens get the globally most frequent tag.
class MftTagger {
 public:
  static MftTagger train(std::span<const TaggedSequence> train_set);

  std::string predict_token(const std::string& token) const;
  TaggedSequence predict(const std::vector<std::string>& tokens) const;
  std::vector<TaggedSequence> predict(std::span<const TaggedSequence> sentences) const;

  const std::string& fallback() const noexcept { return fallback_; }

 private:
  StringMap<std::string> best_;
  std::string fallback_;
};

class MajorityLabel {
 public:
  static MajorityLabel train(std::span<const std::string> labels);
  const std::string& label() const noexcept { return label_; }
  std::vector<std::string> predict(std::size_t n) const { return std::vector<std::string>(n, label_); }

 private:
  std::string label_;
};

}  // namespace tweetforge::eval
