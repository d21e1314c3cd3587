#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "generators.hpp"
#include "oracles.hpp"
#include "tweetforge/eval/conll.hpp"
#include "tweetforge/eval/metrics.hpp"
#include "tweetforge/eval/predictors.hpp"
#include "tweetforge/eval/protocol.hpp"
#include "tweetforge/eval/report.hpp"

using namespace tweetforge;
using namespace tweetforge::eval;

namespace {

ConllData parse(const std::string& text, bool bio = false) {
  std::istringstream in(text);
  return parse_conll(in, ColumnSpec{0, 1, bio}, "mem");
}

TaggedSequence seq(std::vector<std::string> tokens, std::vector<std::string> tags) {
  return TaggedSequence{std::move(tokens), std::move(tags)};
}

}  // namespace

TEST(Conll, ParseAndRepair) {
  const auto d = parse("a\tX\nb\tY\nc\tZ\n\nd\tX\ne\tY\n");
  ASSERT_EQ(d.sentences.size(), 2u);
  EXPECT_EQ(d.sentences[0].size(), 3u);
  EXPECT_EQ(d.sentences[1].size(), 2u);
  EXPECT_TRUE(parse("").sentences.empty());

  const auto r = parse("I\tO\nParis\tI-LOC\n", true);
  EXPECT_EQ(r.sentences[0].tags, (std::vector<std::string>{"O", "B-LOC"}));
  EXPECT_EQ(r.bio_repairs, 1u);

  try {
    parse("a\tX\nb\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("mem:2"), std::string::npos);
  }
}

TEST(Conll, WriteRoundTrip) {
  const std::vector<TaggedSequence> s{seq({"a", "b"}, {"X", "Y"}), seq({"c"}, {"Z"})};
  std::ostringstream out;
  write_conll(out, s);
  EXPECT_EQ(parse(out.str()).sentences, s);
}

TEST(RegexTag, Examples) {
  const std::vector<std::string> t{"RT", "@a", "#b", "http://x", "hello"};
  const auto tags = regex_tag(t);
  EXPECT_EQ(tags[0], "RT");
  EXPECT_EQ(tags[1], "USR");
  EXPECT_EQ(tags[2], "HT");
  EXPECT_EQ(tags[3], "URL");
  EXPECT_FALSE(tags[4]);
  const std::vector<std::string> plain{"hello", "world"};
  const auto none = regex_tag(plain);
  EXPECT_EQ(std::count(none.begin(), none.end(), std::nullopt), 2);
  const std::vector<std::string> user{"@USER"};
  EXPECT_EQ(regex_tag(user)[0], "USR");
}

TEST(PosAccuracy, Examples) {
  std::vector<TaggedSequence> gold{seq({"a", "b", "c", "d", "e"}, {"N", "V", "N", "D", "N"}),
                                   seq({"f", "g", "h", "i", "j"}, {"N", "V", "N", "D", "N"})};
  auto pred = gold;
  EXPECT_DOUBLE_EQ(pos_accuracy(gold, pred, false).metrics.at("accuracy"), 1.0);
  pred[1].tags[4] = "V";
  const auto r = pos_accuracy(gold, pred, false);
  EXPECT_DOUBLE_EQ(r.metrics.at("accuracy"), 0.9);
  EXPECT_EQ(r.n_items, 10u);

  const std::vector<TaggedSequence> g2{seq({"see", "http://t.co/x"}, {"V", "URL"})};
  const std::vector<TaggedSequence> p2{seq({"see", "http://t.co/x"}, {"V", "N"})};
  EXPECT_DOUBLE_EQ(pos_accuracy(g2, p2, false).metrics.at("accuracy"), 0.5);
  EXPECT_DOUBLE_EQ(pos_accuracy(g2, p2, true).metrics.at("accuracy"), 1.0);

  const std::vector<TaggedSequence> short_pred{seq({"see"}, {"V"})};
  try {
    pos_accuracy(g2, short_pred, false);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("sentence 1"), std::string::npos);
  }
}

TEST(Spans, Extraction) {
  auto s = extract_spans(seq({"a", "b", "c", "d"}, {"B-LOC", "I-LOC", "O", "B-PER"}));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (EntitySpan{0, 0, 2, "LOC", "a b"}));
  EXPECT_EQ(s[1], (EntitySpan{0, 3, 4, "PER", "d"}));
  EXPECT_TRUE(extract_spans(seq({"a"}, {"O"})).empty());
  EXPECT_EQ(extract_spans(seq({"a", "b"}, {"B-LOC", "B-LOC"})).size(), 2u);
  EXPECT_EQ(tags_from_spans(4, s), (std::vector<std::string>{"B-LOC", "I-LOC", "O", "B-PER"}));
}

TEST(NerF1, HandComputedFixture) {
  const std::vector<TaggedSequence> gold{seq({"I", "love", "New", "York"}, {"O", "O", "B-LOC", "I-LOC"}),
                                         seq({"New", "York", "on", "Twitter"}, {"B-LOC", "I-LOC", "O", "B-CORP"})};
  const std::vector<TaggedSequence> pred{seq({"I", "love", "New", "York"}, {"O", "O", "B-LOC", "I-LOC"}),
                                         seq({"New", "York", "on", "Twitter"}, {"O", "O", "O", "B-PERSON"})};
  const auto gs = extract_spans(gold), ps = extract_spans(pred);
  const auto e = ner_f1(gs, ps, NerLevel::entity);
  EXPECT_EQ(e.task, "ner-entity");
  EXPECT_DOUBLE_EQ(e.metrics.at("precision"), 0.5);
  EXPECT_DOUBLE_EQ(e.metrics.at("recall"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(e.metrics.at("f1"), 0.4);
  const auto s = ner_f1(gs, ps, NerLevel::surface);
  EXPECT_EQ(s.task, "ner-surface");
  for (auto k : {"precision", "recall", "f1"}) EXPECT_DOUBLE_EQ(s.metrics.at(k), 0.5);

  for (auto level : {NerLevel::entity, NerLevel::surface}) {
    const auto same = ner_f1(gs, gs, level);
    EXPECT_DOUBLE_EQ(same.metrics.at("f1"), 1.0);
    const auto none = ner_f1(gs, {}, level);
    EXPECT_DOUBLE_EQ(none.metrics.at("precision"), 0.0);
    EXPECT_DOUBLE_EQ(none.metrics.at("recall"), 0.0);
    EXPECT_DOUBLE_EQ(none.metrics.at("f1"), 0.0);
  }
}

TEST(Classification, HandComputedConfusions) {
  // recalls: positive 2/2, neutral 1/2, negative 0/2
  const std::vector<std::string> gold{"positive", "positive", "neutral", "neutral", "negative", "negative"};
  const std::vector<std::string> pred{"positive", "positive", "neutral", "positive", "neutral", "neutral"};
  const auto r = classification_metrics(gold, pred, ClassScheme::semeval17);
  EXPECT_NEAR(r.metrics.at("avg_rec"), 0.5, 1e-12);
  // F1(pos) = 2*(2/3)*1/(2/3+1) = 0.8, F1(neg) = 0
  EXPECT_NEAR(r.metrics.at("f1_np"), 0.4, 1e-12);
  EXPECT_NEAR(r.metrics.at("accuracy"), 0.5, 1e-12);

  const std::vector<std::string> ig{"ironic", "ironic", "not-ironic", "not-ironic"};
  const std::vector<std::string> ip{"ironic", "not-ironic", "not-ironic", "not-ironic"};
  const auto i = classification_metrics(ig, ip, ClassScheme::semeval18);
  EXPECT_NEAR(i.metrics.at("f1_pos"), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(i.metrics.at("accuracy"), 0.75, 1e-12);

  const auto perfect = classification_metrics(gold, gold, ClassScheme::semeval17);
  for (const auto& [k, v] : perfect.metrics) EXPECT_DOUBLE_EQ(v, 1.0) << k;

  const std::vector<std::string> no_neg{"positive", "neutral"};
  const auto w = classification_metrics(no_neg, no_neg, ClassScheme::semeval17);
  EXPECT_FALSE(w.warnings.empty());
  EXPECT_NEAR(w.metrics.at("avg_rec"), 2.0 / 3.0, 1e-12);

  const std::vector<std::string> odd{"positive", "sarcastic"};
  EXPECT_THROW(classification_metrics(odd, no_neg, ClassScheme::semeval17), FormatError);
}

TEST(Protocol, EarlyStopHandTrace) {
  const std::vector<double> s{0.5, 0.6, 0.59, 0.58, 0.57, 0.56, 0.55};
  EXPECT_EQ(early_stop(s, 5), (EarlyStop{2, 7}));
  const std::vector<double> rising{0.1, 0.2, 0.3};
  EXPECT_EQ(early_stop(rising, 5), (EarlyStop{3, 3}));
  const std::vector<double> ties{0.5, 0.5, 0.5};
  EXPECT_EQ(early_stop(ties, 2), (EarlyStop{1, 3}));
  EXPECT_THROW(early_stop(std::vector<double>{}, 5), ConfigError);
}

TEST(Protocol, SplitNinetyTen) {
  std::vector<int> items(100);
  for (int i = 0; i < 100; ++i) items[i] = i;
  const auto [train, valid] = split_train_valid<int>(items, 0.1, 42);
  EXPECT_EQ(train.size(), 90u);
  EXPECT_EQ(valid.size(), 10u);
  std::vector<int> all = train;
  all.insert(all.end(), valid.begin(), valid.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, items);
  EXPECT_EQ(split_train_valid<int>(items, 0.1, 42).second, valid);
  EXPECT_NE(split_train_valid<int>(items, 0.1, 43).second, valid);
  EXPECT_THROW(split_indices(1, 0.1, 1), ConfigError);
  EXPECT_THROW(split_indices(10, 1.0, 1), ConfigError);
}

TEST(Protocol, Aggregate) {
  std::vector<MetricReport> runs;
  for (double v : {0.5, 0.7, 0.9}) runs.push_back(MetricReport{"pos", {{"accuracy", v}}, 10, 0, {}});
  const auto a = aggregate_runs(runs);
  EXPECT_EQ(a.runs, 3u);
  EXPECT_NEAR(a.metrics.at("accuracy").mean, 0.7, 1e-12);
  EXPECT_NEAR(a.metrics.at("accuracy").std, 0.2, 1e-12);
  runs[1].task = "ner";
  EXPECT_THROW(aggregate_runs(runs), FormatError);
  EXPECT_THROW(aggregate_runs({}), ConfigError);
}

TEST(Predictors, MftAndMajority) {
  const std::vector<TaggedSequence> train{seq({"a", "b", "a"}, {"X", "Y", "Z"}), seq({"a", "c"}, {"X", "Y"})};
  const auto m = MftTagger::train(train);
  EXPECT_EQ(m.predict_token("a"), "X");
  EXPECT_EQ(m.predict_token("b"), "Y");
  EXPECT_EQ(m.predict_token("unseen"), m.fallback());
  EXPECT_EQ(m.fallback(), "X");  // X and Y both occur twice; the smaller tag wins ties
  const std::vector<std::string> labels{"neutral", "positive", "neutral"};
  EXPECT_EQ(MajorityLabel::train(labels).label(), "neutral");
  EXPECT_THROW(MajorityLabel::train(std::vector<std::string>{}), ConfigError);
}

TEST(Report, TextAndJsonRoundTrip) {
  const MetricReport r{"sentiment", {{"accuracy", 0.25}, {"avg_rec", 1.0 / 3.0}}, 12, 3, {"no gold negative"}};
  std::ostringstream text;
  write_report_text(text, r);
  EXPECT_EQ(parse_report(text.str()), r);
  EXPECT_EQ(parse_report(report_to_json(r)), r);

  std::istringstream docs("d1\tpositive\tgreat day\nd2\tnegative\tawful\n");
  const auto parsed = parse_labeled_docs(docs);
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[1], (LabeledDoc{"d2", "awful", "negative"}));
}

// ---- properties

TEST(NerProperty, MatchesBruteForce) {
  tftest::Gen g(55);
  const std::vector<std::string> types{"LOC", "PER", "ORG"};
  const std::vector<std::string> vocab{"a", "b", "c", "d"};
  auto random_corpus = [&](const std::vector<TaggedSequence>* like) {
    std::vector<TaggedSequence> out;
    const std::size_t n = like ? like->size() : g.range(1, 5);
    for (std::size_t s = 0; s < n; ++s) {
      TaggedSequence t;
      const std::size_t len = like ? (*like)[s].size() : g.range(1, 8);
      for (std::size_t i = 0; i < len; ++i) {
        t.tokens.push_back(like ? (*like)[s].tokens[i] : g.pick(vocab));
        const auto r = g.below(4);
        t.tags.push_back(r == 0 ? "O" : (r == 1 ? "I-" : "B-") + g.pick(types));
      }
      repair_bio(t.tags);
      out.push_back(std::move(t));
    }
    return out;
  };
  for (int n = 0; n < 500; ++n) {
    const auto gold = random_corpus(nullptr);
    const auto pred = random_corpus(&gold);
    const auto gs = extract_spans(gold), ps = extract_spans(pred);
    for (auto level : {NerLevel::entity, NerLevel::surface}) {
      const auto c = level == NerLevel::entity ? tftest::brute_entity_counts(gs, ps)
                                               : tftest::brute_surface_counts(gs, ps);
      const double p = c.n_pred ? static_cast<double>(c.tp) / c.n_pred : 0.0;
      const double r = c.n_gold ? static_cast<double>(c.tp) / c.n_gold : 0.0;
      const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
      const auto rep = ner_f1(gs, ps, level);
      ASSERT_NEAR(rep.metrics.at("precision"), p, 1e-12);
      ASSERT_NEAR(rep.metrics.at("recall"), r, 1e-12);
      ASSERT_NEAR(rep.metrics.at("f1"), f, 1e-12);
    }
  }
}

TEST(ProtocolProperty, SplitAndAggregate) {
  tftest::Gen g(56);
  for (int n = 0; n < 300; ++n) {
    const std::size_t size = g.range(2, 300);
    const double frac = 0.05 + 0.9 * g.unit();
    const auto idx = split_indices(size, frac, g.below(1000));
    ASSERT_EQ(idx.valid.size(), static_cast<std::size_t>(std::nearbyint(frac * size)));
    std::vector<std::size_t> all = idx.train;
    all.insert(all.end(), idx.valid.begin(), idx.valid.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < size; ++i) ASSERT_EQ(all[i], i);

    std::vector<MetricReport> runs;
    for (std::size_t k = g.range(1, 6); k > 0; --k) runs.push_back({"x", {{"m", g.unit()}}, 1, 0, {}});
    const auto a = aggregate_runs(runs);
    const auto& s = a.metrics.at("m");
    ASSERT_LE(s.min, s.mean);
    ASSERT_LE(s.mean, s.max);
    std::shuffle(runs.begin(), runs.end(), g.engine());
    ASSERT_EQ(aggregate_runs(runs), a);
  }
}
