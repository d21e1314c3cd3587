#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tweetforge/common.hpp"

namespace tweetforge {

struct LangScore {
  std::string lang;
  double confidence = 0.0;
  friend bool operator==(const LangScore&, const LangScore&) = default;
};

inline constexpr std::string_view kUndeterminedLang = "und";

class LanguageIdentifier {
 public:
  virtual ~LanguageIdentifier() = default;
  // `hint` is the record's language metadata, when present.
  virtual LangScore identify(std::string_view text, std::optional<std::string_view> hint) const = 0;
};

// Trusts the record's language metadata.
class PassThroughIdentifier final : public LanguageIdentifier {
 public:
  LangScore identify(std::string_view text, std::optional<std::string_view> hint) const override;
};

/// Multinomial naive Bayes over character 1..3-grams with add-one smoothing.
///
/// Text is case-folded and every non-letter run collapses to a single space
/// before n-grams are extracted, so digits, punctuation and emoji carry no
/// evidence. Confidence is the posterior of the top language under a uniform
/// prior.
class NgramLanguageModel final : public LanguageIdentifier {
 public:
  static constexpr int kMaxOrder = 3;

  static NgramLanguageModel train(const std::map<std::string, std::string>& samples_by_lang);

  // Trained on the bundled en/es/fr seed text.
  static const NgramLanguageModel& builtin();

  LangScore identify(std::string_view text, std::optional<std::string_view> hint) const override;

  // Per-language log-likelihoods, in languages() order.
  std::vector<double> log_likelihoods(std::string_view text) const;
  const std::vector<std::string>& languages() const noexcept { return langs_; }

 private:
  std::vector<std::string> langs_;
  StringMap<std::vector<double>> log_prob_;
  std::vector<double> unseen_log_prob_;
};

// Applies the empty-text rule before delegating to `model`.
LangScore identify_language(std::string_view text, const LanguageIdentifier& model,
                            std::optional<std::string_view> hint = std::nullopt);

// Text as seen by the n-gram model: folded letters, single spaces, padded.
std::string langid_features_text(std::string_view text);

}  // namespace tweetforge
