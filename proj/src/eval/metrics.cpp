#include "tweetforge/eval/metrics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "tweetforge/common.hpp"

namespace tweetforge::eval {

namespace {

double ratio(double num, double den) noexcept { return den > 0 ? num / den : 0.0; }

MetricReport prf(std::string task, double tp, double n_pred, double n_gold, std::uint64_t n_items) {
  MetricReport r;
  r.task = std::move(task);
  r.n_items = n_items;
  const double p = ratio(tp, n_pred);
  const double rec = ratio(tp, n_gold);
  r.metrics["precision"] = p;
  r.metrics["recall"] = rec;
  r.metrics["f1"] = f1_score(p, rec);
  return r;
}

}  // namespace

double f1_score(double precision, double recall) noexcept {
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

RegexTagMap default_regex_tags() {
  return {{TokenClass::rt_marker, "RT"},
          {TokenClass::mention, "USR"},
          {TokenClass::hashtag, "HT"},
          {TokenClass::url, "URL"}};
}

std::vector<std::optional<std::string>> regex_tag(std::span<const std::string> tokens,
                                                  const RegexTagMap& mapping) {
  const TweetTokenizer tokenizer;
  std::vector<std::optional<std::string>> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = mapping.find(tokenizer.classify(tokens[i], i == 0));
    if (it != mapping.end()) out[i] = it->second;
  }
  return out;
}

MetricReport pos_accuracy(std::span<const TaggedSequence> gold, std::span<const TaggedSequence> pred,
                          bool regex_override, const RegexTagMap& mapping) {
  if (gold.size() != pred.size()) {
    throw FormatError("gold has " + std::to_string(gold.size()) + " sentences, predictions " +
                      std::to_string(pred.size()));
  }
  std::uint64_t total = 0, correct = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size() || gold[s].tags.size() != pred[s].tags.size()) {
      throw FormatError("sentence " + std::to_string(s + 1) + ": gold has " +
                        std::to_string(gold[s].size()) + " tokens, predictions " +
                        std::to_string(pred[s].size()));
    }
    std::vector<std::optional<std::string>> forced;
    if (regex_override) forced = regex_tag(gold[s].tokens, mapping);
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      const std::string& p = regex_override && forced[i] ? *forced[i] : pred[s].tags[i];
      correct += p == gold[s].tags[i];
      ++total;
    }
  }
  MetricReport r;
  r.task = "pos";
  r.n_items = total;
  r.metrics["accuracy"] = ratio(static_cast<double>(correct), static_cast<double>(total));
  return r;
}

std::vector<EntitySpan> extract_spans(const TaggedSequence& seq, std::size_t sentence_index) {
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> cur;
  auto close = [&](std::size_t end) {
    if (!cur) return;
    cur->end = end;
    for (std::size_t k = cur->start; k < end; ++k) {
      if (k > cur->start) cur->surface.push_back(' ');
      cur->surface += seq.tokens[k];
    }
    spans.push_back(std::move(*cur));
    cur.reset();
  };
  for (std::size_t i = 0; i < seq.tags.size(); ++i) {
    const std::string& t = seq.tags[i];
    const bool begin = t.rfind("B-", 0) == 0;
    const bool inside = t.rfind("I-", 0) == 0;
    const std::string type = (begin || inside) ? t.substr(2) : std::string();
    if (inside && cur && cur->type == type) continue;
    close(i);
    if (begin || inside) cur = EntitySpan{sentence_index, i, i, type, {}};
  }
  close(seq.tags.size());
  return spans;
}

std::vector<EntitySpan> extract_spans(std::span<const TaggedSequence> corpus) {
  std::vector<EntitySpan> all;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    auto part = extract_spans(corpus[s], s);
    std::move(part.begin(), part.end(), std::back_inserter(all));
  }
  return all;
}

std::vector<std::string> tags_from_spans(std::size_t n, std::span<const EntitySpan> spans) {
  std::vector<std::string> tags(n, "O");
  for (const auto& s : spans) {
    for (std::size_t i = s.start; i < s.end && i < n; ++i)
      tags[i] = (i == s.start ? "B-" : "I-") + s.type;
  }
  return tags;
}

std::optional<NerLevel> parse_ner_level(std::string_view s) noexcept {
  if (s == "entity") return NerLevel::entity;
  if (s == "surface") return NerLevel::surface;
  return std::nullopt;
}

MetricReport ner_f1(std::span<const EntitySpan> gold, std::span<const EntitySpan> pred, NerLevel level) {
  if (level == NerLevel::entity) {
    using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::string_view>;
    std::map<Key, std::size_t> g;
    for (const auto& s : gold) ++g[Key{s.sentence_index, s.start, s.end, s.type}];
    std::size_t tp = 0;
    for (const auto& s : pred) {
      auto it = g.find(Key{s.sentence_index, s.start, s.end, s.type});
      if (it != g.end() && it->second > 0) {
        --it->second;
        ++tp;
      }
    }
    return prf("ner-entity", static_cast<double>(tp), static_cast<double>(pred.size()),
               static_cast<double>(gold.size()), gold.size());
  }
  using Key = std::pair<std::string_view, std::string_view>;
  std::set<Key> g, p;
  for (const auto& s : gold) g.emplace(s.surface, s.type);
  for (const auto& s : pred) p.emplace(s.surface, s.type);
  std::size_t tp = 0;
  for (const auto& k : p) tp += g.count(k);
  return prf("ner-surface", static_cast<double>(tp), static_cast<double>(p.size()),
             static_cast<double>(g.size()), g.size());
}

std::optional<ClassScheme> parse_class_scheme(std::string_view s) noexcept {
  if (s == "semeval17") return ClassScheme::semeval17;
  if (s == "semeval18") return ClassScheme::semeval18;
  return std::nullopt;
}

std::vector<std::string> scheme_labels(ClassScheme scheme) {
  if (scheme == ClassScheme::semeval17) return {"positive", "neutral", "negative"};
  return {"ironic", "not-ironic"};
}

MetricReport classification_metrics(std::span<const std::string> gold,
                                    std::span<const std::string> pred, ClassScheme scheme) {
  if (gold.size() != pred.size()) {
    throw FormatError("gold has " + std::to_string(gold.size()) + " labels, predictions " +
                      std::to_string(pred.size()));
  }
  const auto labels = scheme_labels(scheme);
  auto index_of = [&](const std::string& l, const char* side, std::size_t i) {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) {
      throw FormatError(std::string(side) + " item " + std::to_string(i + 1) + ": label '" + l +
                        "' is not in the scheme");
    }
    return static_cast<std::size_t>(it - labels.begin());
  };
  const std::size_t k = labels.size();
  std::vector<double> tp(k), gold_n(k), pred_n(k);
  double correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = index_of(gold[i], "gold", i);
    const auto p = index_of(pred[i], "prediction", i);
    ++gold_n[g];
    ++pred_n[p];
    if (g == p) {
      ++tp[g];
      ++correct;
    }
  }
  MetricReport r;
  r.n_items = gold.size();
  auto recall = [&](std::size_t c) {
    if (gold_n[c] == 0) r.warnings.push_back("no gold instances of '" + labels[c] + "'; recall set to 0");
    return ratio(tp[c], gold_n[c]);
  };
  auto f1 = [&](std::size_t c) { return f1_score(ratio(tp[c], pred_n[c]), ratio(tp[c], gold_n[c])); };
  r.metrics["accuracy"] = ratio(correct, static_cast<double>(gold.size()));
  if (scheme == ClassScheme::semeval17) {
    r.task = "sentiment";
    double sum = 0;
    for (std::size_t c = 0; c < k; ++c) sum += recall(c);
    r.metrics["avg_rec"] = sum / static_cast<double>(k);
    r.metrics["f1_np"] = (f1(0) + f1(2)) / 2.0;
  } else {
    r.task = "irony";
    if (gold_n[0] == 0) r.warnings.push_back("no gold instances of 'ironic'; recall set to 0");
    r.metrics["f1_pos"] = f1(0);
  }
  return r;
}

}  // namespace tweetforge::eval
