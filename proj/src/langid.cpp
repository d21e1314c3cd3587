#include "tweetforge/langid.hpp"

#include <cmath>

#include "tweetforge/emoji.hpp"
#include "tweetforge/utf8.hpp"

namespace tweetforge {

namespace embedded {
extern const std::string_view langid_en;
extern const std::string_view langid_es;
extern const std::string_view langid_fr;
}  // namespace embedded

namespace {

bool is_letter(char32_t cp) {
  if (cp < 0x80) return (cp | 0x20) >= 'a' && (cp | 0x20) <= 'z';
  return !utf8::is_space(cp) && !utf8::is_punct(cp) && !is_pictographic(cp) &&
         !is_emoji_component(cp) && cp != utf8::kReplacement;
}

template <class F>
void for_each_ngram(std::string_view padded, F&& f) {
  const auto cps = utf8::split_codepoints(padded);
  for (int n = 1; n <= NgramLanguageModel::kMaxOrder; ++n) {
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      const std::size_t start = static_cast<std::size_t>(cps[i].data() - padded.data());
      const std::size_t end =
          static_cast<std::size_t>(cps[i + n - 1].data() - padded.data()) + cps[i + n - 1].size();
      const std::string_view gram = padded.substr(start, end - start);
      if (gram.find_first_not_of(' ') == std::string_view::npos) continue;
      f(gram);
    }
  }
}

}  // namespace

std::string langid_features_text(std::string_view text) {
  std::string out = " ";
  for (std::size_t i = 0; i < text.size();) {
    const auto d = utf8::decode(text, i);
    i += d.len;
    if (d.valid && is_letter(d.cp)) {
      utf8::append(out, utf8::fold_codepoint(d.cp));
    } else if (out.back() != ' ') {
      out.push_back(' ');
    }
  }
  if (out.back() != ' ') out.push_back(' ');
  return out;
}

LangScore PassThroughIdentifier::identify(std::string_view,
                                          std::optional<std::string_view> hint) const {
  if (!hint || hint->empty()) return {std::string(kUndeterminedLang), 0.0};
  return {std::string(*hint), 1.0};
}

NgramLanguageModel NgramLanguageModel::train(
    const std::map<std::string, std::string>& samples_by_lang) {
  NgramLanguageModel model;
  const std::size_t n_langs = samples_by_lang.size();
  StringMap<std::vector<double>> counts;
  std::vector<double> totals(n_langs, 0.0);
  std::size_t li = 0;
  for (const auto& [lang, text] : samples_by_lang) {
    model.langs_.push_back(lang);
    for_each_ngram(langid_features_text(text), [&](std::string_view gram) {
      auto it = counts.find(gram);
      if (it == counts.end()) it = counts.emplace(std::string(gram), std::vector<double>(n_langs)).first;
      it->second[li] += 1.0;
      totals[li] += 1.0;
    });
    ++li;
  }
  const double vocab = static_cast<double>(counts.size());
  model.unseen_log_prob_.resize(n_langs);
  for (std::size_t l = 0; l < n_langs; ++l)
    model.unseen_log_prob_[l] = -std::log(totals[l] + vocab);
  for (auto& [gram, c] : counts) {
    std::vector<double> lp(n_langs);
    for (std::size_t l = 0; l < n_langs; ++l) lp[l] = std::log(c[l] + 1.0) + model.unseen_log_prob_[l];
    model.log_prob_.emplace(gram, std::move(lp));
  }
  return model;
}

const NgramLanguageModel& NgramLanguageModel::builtin() {
  static const NgramLanguageModel model = train({
      {"en", std::string(embedded::langid_en)},
      {"es", std::string(embedded::langid_es)},
      {"fr", std::string(embedded::langid_fr)},
  });
  return model;
}

std::vector<double> NgramLanguageModel::log_likelihoods(std::string_view text) const {
  std::vector<double> ll(langs_.size(), 0.0);
  for_each_ngram(langid_features_text(text), [&](std::string_view gram) {
    auto it = log_prob_.find(gram);
    const std::vector<double>& lp = it == log_prob_.end() ? unseen_log_prob_ : it->second;
    for (std::size_t l = 0; l < ll.size(); ++l) ll[l] += lp[l];
  });
  return ll;
}

LangScore NgramLanguageModel::identify(std::string_view text,
                                       std::optional<std::string_view>) const {
  if (langs_.empty() || langid_features_text(text).size() <= 1) {
    return {std::string(kUndeterminedLang), 0.0};
  }
  const auto ll = log_likelihoods(text);
  std::size_t best = 0;
  for (std::size_t l = 1; l < ll.size(); ++l)
    if (ll[l] > ll[best]) best = l;
  double denom = 0.0;
  for (double v : ll) denom += std::exp(v - ll[best]);
  return {langs_[best], 1.0 / denom};
}

LangScore identify_language(std::string_view text, const LanguageIdentifier& model,
                            std::optional<std::string_view> hint) {
  if (text.empty()) return {std::string(kUndeterminedLang), 0.0};
  return model.identify(text, hint);
}

}  // namespace tweetforge
