// Acceptance driver: one PASS/FAIL line per criterion. Exit status reflects
// criteria 1-7; the throughput line is informational.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "tweetforge/bpe.hpp"
#include "tweetforge/corpus.hpp"
#include "tweetforge/eval/conll.hpp"
#include "tweetforge/eval/metrics.hpp"
#include "tweetforge/eval/protocol.hpp"
#include "tweetforge/eval/report.hpp"
#include "tweetforge/kernels.hpp"
#include "tweetforge/mask.hpp"
#include "tweetforge/normalize.hpp"
#include "tweetforge/pack.hpp"
#include "tweetforge/pipeline.hpp"
#include "tweetforge/synth.hpp"

using namespace tweetforge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kData = TWEETFORGE_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first failure message; later checks still run.
class Checker {
 public:
  bool check(bool ok, const std::string& what) {
    if (!ok && pass_) {
      pass_ = false;
      first_ = what;
    }
    return ok;
  }
  Outcome done(std::string detail) const {
    return {pass_, pass_ ? std::move(detail) : first_ + "; " + detail};
  }

 private:
  bool pass_ = true;
  std::string first_;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

fs::path fresh(const std::string& name) {
  auto p = fs::temp_directory_path() / ("tweetforge-acceptance-" + name);
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream f(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(f), {}};
  }
  return files;
}

std::vector<std::string> normalized_lines(std::span<const RawTweet> tweets) {
  std::vector<std::string> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) out.push_back(soft_normalize(tokenize(t.text)).joined());
  return out;
}

// 1. Block-count arithmetic on a 10k synthetic corpus.
Outcome block_count() {
  const auto t0 = Clock::now();
  SynthConfig sc;
  sc.tweets = 10000;
  sc.seed = 2020;
  sc.retweet_rate = sc.foreign_rate = sc.short_rate = sc.long_rate = 0.0;
  const auto tweets = synth_tweets(sc);
  const auto lines = normalized_lines(tweets);

  const auto table = learn_bpe(count_words(lines, 1), BpeLearnConfig{});
  const auto encoded = encode_lines(lines, table, 1);
  std::vector<PackInput> inputs;
  std::uint64_t subwords = 0;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    subwords += encoded[i].size();
    inputs.push_back({tweets[i].id, encoded[i].ids});
  }
  PackStats ps;
  const auto blocks = pack_blocks(inputs, PackConfig{}, &ps);
  const double secs = seconds_since(t0);

  const double avg = static_cast<double>(subwords) / static_cast<double>(tweets.size());
  const double expected = 10000.0 * 27.0 / 128.0;
  const double rel = (static_cast<double>(blocks.size()) - expected) / expected;
  Checker c;
  c.check(tweets.size() == 10000, "corpus size " + std::to_string(tweets.size()));
  c.check(std::fabs(avg - 25.0) <= 1.0, fmt("avg subwords %.3f outside 25 +/- 1", avg));
  c.check(std::fabs(rel) <= 0.05, fmt("blocks %zu vs expected %.1f", blocks.size(), expected));
  c.check(secs < 30.0, fmt("runtime %.2fs >= 30s", secs));
  return c.done(fmt("avg_subwords=%.3f blocks=%zu expected=%.1f deviation=%+.2f%% vocab=%zu time=%.2fs", avg,
                    blocks.size(), expected, 100.0 * rel, table.vocab_size(), secs));
}

// 2. learn_bpe against the recount-from-scratch reference.
Outcome bpe_oracle() {
  const auto t0 = Clock::now();
  tftest::Gen g(4242);
  Checker c;
  std::size_t corpora = 0, merges = 0, words_checked = 0;
  while (corpora < 200) {
    std::map<std::string, std::uint64_t> words;
    const std::size_t distinct = g.range(1, 100);
    const char* alphabet = corpora % 3 == 0 ? "ab" : (corpora % 3 == 1 ? "abcd" : "abcdefghij");
    while (words.size() < distinct) words[g.lower_word(1, 10, alphabet)] = g.range(1, 20);
    std::set<char> letters;
    for (const auto& [w, n] : words) letters.insert(w.begin(), w.end());
    const std::size_t target = 5 + 2 * letters.size() + g.range(1, 300);
    const std::uint64_t min_freq = g.range(1, 3);
    ++corpora;

    const auto oracle = tftest::naive_learn_bpe(words, target, min_freq);
    const auto t = learn_bpe(WordCounts(words.begin(), words.end()), BpeLearnConfig{target, min_freq, 1});
    merges += t.merges().size();
    c.check(t.merges() == oracle.merges, "merge list differs on corpus " + std::to_string(corpora));
    c.check(t.vocab() == oracle.vocab, "vocabulary differs on corpus " + std::to_string(corpora));
    for (const auto& [w, n] : words) {
      std::vector<std::string> one{w};
      const auto s = apply_bpe(std::span<const std::string>(one), t);
      ++words_checked;
      c.check(s.unk_count == 0 && decode_bpe(s) == one, "encode/decode not identity for '" + w + "'");
      c.check(s.pieces == tftest::naive_encode_word(w, t.merges()), "segmentation differs for '" + w + "'");
    }
  }
  const double secs = seconds_since(t0);
  c.check(secs < 120.0, fmt("runtime %.2fs >= 120s", secs));
  return c.done(fmt("corpora=%zu merges=%zu words=%zu time=%.2fs", corpora, merges, words_checked, secs));
}

eval::TaggedSequence seq(std::vector<std::string> tokens, std::vector<std::string> tags) {
  eval::TaggedSequence s;
  s.tokens = std::move(tokens);
  s.tags = std::move(tags);
  return s;
}

// 3. Metric oracles.
Outcome metric_oracles() {
  using namespace eval;
  Checker c;
  tftest::Gen g(3003);
  const std::vector<std::string> types{"LOC", "PER", "ORG"};
  const std::vector<std::string> vocab{"a", "b", "c", "d"};
  std::size_t spans = 0;
  for (int n = 0; n < 500; ++n) {
    std::vector<TaggedSequence> gold, pred;
    for (std::size_t s = g.range(1, 5); s > 0; --s) {
      TaggedSequence a, b;
      for (std::size_t i = g.range(1, 8); i > 0; --i) {
        const auto tok = g.pick(vocab);
        a.tokens.push_back(tok);
        b.tokens.push_back(tok);
        for (auto* t : {&a, &b}) {
          const auto r = g.below(4);
          t->tags.push_back(r == 0 ? "O" : (r == 1 ? "I-" : "B-") + g.pick(types));
        }
      }
      repair_bio(a.tags);
      repair_bio(b.tags);
      gold.push_back(std::move(a));
      pred.push_back(std::move(b));
    }
    const auto gs = extract_spans(gold), ps = extract_spans(pred);
    spans += gs.size() + ps.size();
    for (auto level : {NerLevel::entity, NerLevel::surface}) {
      const auto k = level == NerLevel::entity ? tftest::brute_entity_counts(gs, ps) : tftest::brute_surface_counts(gs, ps);
      const double p = k.n_pred ? static_cast<double>(k.tp) / k.n_pred : 0.0;
      const double r = k.n_gold ? static_cast<double>(k.tp) / k.n_gold : 0.0;
      const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
      const auto rep = ner_f1(gs, ps, level);
      c.check(std::fabs(rep.metrics.at("precision") - p) <= 1e-12 && std::fabs(rep.metrics.at("recall") - r) <= 1e-12 &&
                  std::fabs(rep.metrics.at("f1") - f) <= 1e-12,
              "ner_f1 disagrees with brute force on micro-corpus " + std::to_string(n));
    }
  }

  const std::vector<TaggedSequence> gold{seq({"I", "love", "New", "York"}, {"O", "O", "B-LOC", "I-LOC"}),
                                         seq({"New", "York", "on", "Twitter"}, {"B-LOC", "I-LOC", "O", "B-CORP"})};
  const std::vector<TaggedSequence> pred{seq({"I", "love", "New", "York"}, {"O", "O", "B-LOC", "I-LOC"}),
                                         seq({"New", "York", "on", "Twitter"}, {"O", "O", "O", "B-PERSON"})};
  const double ef = ner_f1(extract_spans(gold), extract_spans(pred), NerLevel::entity).metrics.at("f1");
  const double sf = ner_f1(extract_spans(gold), extract_spans(pred), NerLevel::surface).metrics.at("f1");
  c.check(std::fabs(ef - 0.4) <= 1e-12, fmt("entity F1 %.15g != 0.4", ef));
  c.check(std::fabs(sf - 0.5) <= 1e-12, fmt("surface F1 %.15g != 0.5", sf));

  const std::vector<std::string> g17{"positive", "positive", "neutral", "neutral", "negative", "negative"};
  const std::vector<std::string> p17{"positive", "positive", "neutral", "positive", "neutral", "neutral"};
  const auto r17 = classification_metrics(g17, p17, ClassScheme::semeval17);
  c.check(std::fabs(r17.metrics.at("avg_rec") - 0.5) <= 1e-12, "AvgRec fixture");
  c.check(std::fabs(r17.metrics.at("f1_np") - 0.4) <= 1e-12, "F1^NP fixture");
  const std::vector<std::string> g18{"ironic", "ironic", "not-ironic", "not-ironic"};
  const std::vector<std::string> p18{"ironic", "not-ironic", "not-ironic", "not-ironic"};
  const auto r18 = classification_metrics(g18, p18, ClassScheme::semeval18);
  c.check(std::fabs(r18.metrics.at("f1_pos") - 2.0 / 3.0) <= 1e-12, "F1^pos fixture");
  return c.done(fmt("micro_corpora=500 spans=%zu entity_f1=%.3f surface_f1=%.3f avg_rec=%.3f f1_np=%.3f f1_pos=%.4f",
                    spans, ef, sf, r17.metrics.at("avg_rec"), r17.metrics.at("f1_np"), r18.metrics.at("f1_pos")));
}

// 4. Normalization invariants.
Outcome normalization() {
  Checker c;
  tftest::Gen g(4004);
  const std::vector<LexNormDict> chain{[] {
    std::istringstream in("@user\tX\nhttpurl\tX\n:face_with_tears_of_joy:\tX\n:red_heart:\tX\nrt\tretweet\nu\tyou\n:)\tsmile\n");
    return parse_lexnorm_dict(in, "acceptance");
  }()};
  std::size_t tokens = 0, rewrites = 0;
  for (int n = 0; n < 10000; ++n) {
    const auto src = tokenize(g.tweet());
    const auto once = soft_normalize(src);
    const auto twice = soft_normalize(once.tokens);
    tokens += src.size();
    c.check(once.tokens.size() == src.size(), "soft_normalize changed the token count of: " + src.source);
    c.check(twice.tokens.texts() == once.tokens.texts(), "soft_normalize not idempotent on: " + src.source);
    c.check(split_pretokenized(once.joined()).size() == src.size(), "stored form changes the count of: " + src.source);

    const auto hard = hard_normalize(once.tokens, chain);
    rewrites += hard.change_log.size();
    for (std::size_t i = 0; i < hard.tokens.size(); ++i) {
      const auto& before = once.tokens.tokens[i];
      const bool special = before.cls != TokenClass::word || before.text == kUserToken || before.text == kUrlToken;
      if (special) c.check(hard.tokens.tokens[i].text == before.text, "hard_normalize rewrote '" + before.text + "'");
    }
  }
  return c.done(fmt("tweets=10000 tokens=%zu hard_rewrites=%zu", tokens, rewrites));
}

// 5. Masking statistics over 10k blocks.
Outcome masking() {
  Checker c;
  tftest::Gen g(5005);
  constexpr std::uint32_t kVocab = 2000;
  std::vector<PackInput> inputs;
  for (std::size_t i = 0; inputs.size() < 60000; ++i) {
    PackInput p{"t" + std::to_string(i), {}};
    for (std::size_t k = g.range(1, 40); k > 0; --k) p.ids.push_back(static_cast<std::uint32_t>(g.range(5, kVocab - 1)));
    inputs.push_back(std::move(p));
  }
  auto blocks = pack_blocks(inputs, PackConfig{});
  if (blocks.size() < 10000) return {false, fmt("only %zu blocks", blocks.size())};
  blocks.resize(10000);

  MaskPolicy policy;
  policy.seed = 17;
  const auto serial = mask_blocks_serial(blocks, policy, 3, kVocab);
  for (int w : {1, 4, 8})
    c.check(mask_blocks(blocks, policy, 3, kVocab, w) == serial, "output differs at workers " + std::to_string(w));

  const SpecialIds sp;
  std::uint64_t counts[3] = {0, 0, 0};
  std::uint64_t labels = 0;
  for (std::size_t i = 0; i < serial.size(); ++i) {
    const auto& ex = serial[i];
    for (std::size_t k = 0; k < ex.label_positions.size(); ++k) {
      const auto orig = blocks[i].ids[ex.label_positions[k]];
      c.check(!sp.is_special(orig), fmt("label on special id %u in block %zu", orig, i));
      ++counts[static_cast<int>(ex.actions[k])];
      ++labels;
    }
  }
  const double fm = static_cast<double>(counts[0]) / labels;
  const double fr = static_cast<double>(counts[1]) / labels;
  const double fk = static_cast<double>(counts[2]) / labels;
  c.check(std::fabs(fm - 0.8) <= 0.02 && std::fabs(fr - 0.1) <= 0.02 && std::fabs(fk - 0.1) <= 0.02,
          fmt("action fractions %.4f/%.4f/%.4f", fm, fr, fk));
  return c.done(fmt("examples=10000 labels=%llu mask=%.4f random=%.4f keep=%.4f workers=1,4,8 identical",
                    static_cast<unsigned long long>(labels), fm, fr, fk));
}

// 6. Early stopping and the validation split.
Outcome protocol() {
  using namespace eval;
  Checker c;
  const std::vector<double> scores{0.5, 0.6, 0.59, 0.58, 0.57, 0.56, 0.55};
  const auto es = early_stop(scores, 5);
  c.check(es == EarlyStop{2, 7}, fmt("early_stop gave (%zu, %zu)", es.best_epoch, es.stop_epoch));

  std::vector<int> items(1000);
  for (int i = 0; i < 1000; ++i) items[i] = i;
  const auto [train, valid] = split_train_valid<int>(items, 0.1, 42);
  const auto again = split_train_valid<int>(items, 0.1, 42);
  const auto other = split_train_valid<int>(items, 0.1, 43);
  c.check(train.size() == 900 && valid.size() == 100, fmt("split sizes %zu/%zu", train.size(), valid.size()));
  c.check(again.first == train && again.second == valid, "split not deterministic for a fixed seed");
  c.check(other.second != valid, "different seeds gave the same split");
  std::vector<int> all(train);
  all.insert(all.end(), valid.begin(), valid.end());
  std::sort(all.begin(), all.end());
  c.check(all == items, "split is not a partition");
  return c.done(fmt("best_epoch=%zu stop_epoch=%zu train=%zu valid=%zu", es.best_epoch, es.stop_epoch, train.size(),
                    valid.size()));
}

// 7. Presets end to end.
Outcome smoke() {
  Checker c;
  const auto t0 = Clock::now();
  const fs::path a = fresh("pretrain-a"), b = fresh("pretrain-b");
  for (const auto& dir : {a, b}) {
    auto cfg = pipeline::load_config(kData / "configs/pretrain.ini");
    cfg.output_dir = dir;
    cfg.validate();
    std::ostringstream log;
    const auto summary = pipeline::run(cfg, log);
    c.check(summary.stages == std::vector<std::string>{"ingest", "normalize", "bpe-learn", "bpe-apply", "pack", "mask"},
            "unexpected pretrain stages");
  }
  const double secs = seconds_since(t0) / 2.0;
  const auto sa = snapshot(a);
  c.check(sa == snapshot(b), "pretrain outputs differ between runs");
  c.check(sa.contains("masked/epoch-0/manifest.json"), "no masked output");
  c.check(secs < 120.0, fmt("pretrain %.2fs >= 120s", secs));

  const fs::path e = fresh("eval");
  auto cfg = pipeline::load_config(kData / "configs/eval.ini");
  cfg.output_dir = e;
  cfg.validate();
  std::ostringstream log;
  pipeline::run(cfg, log);
  std::size_t reports = 0;
  for (const auto* task : {"pos", "ner-entity", "ner-surface", "sentiment", "irony"}) {
    for (auto seed : cfg.eval.seeds) {
      const auto stem = e / "eval" / task / ("seed-" + std::to_string(seed));
      const auto txt = eval::read_report(stem.string() + ".txt");
      const auto js = eval::read_report(stem.string() + ".json");
      ++reports;
      c.check(txt == js && txt.task == task && txt.n_items > 0 && !txt.metrics.empty(),
              std::string("malformed report for ") + task);
      for (const auto& [k, v] : txt.metrics) c.check(v >= 0.0 && v <= 1.0, std::string(task) + " " + k + " out of range");
    }
    c.check(fs::exists(e / "eval" / task / "aggregate.json"), std::string("no aggregate for ") + task);
  }
  return c.done(fmt("pretrain_files=%zu identical=%s pretrain_time=%.2fs eval_reports=%zu", sa.size(),
                    sa == snapshot(b) ? "yes" : "no", secs, reports));
}

// 8. Raw-tweet throughput: tokenize + soft normalize + bpe-apply.
Outcome throughput() {
  std::ifstream in(kData / "fixtures/tweets.jsonl");
  const auto raw = read_tweets(in, IngestFormat::jsonl).tweets;
  const auto table = learn_bpe(count_words(normalized_lines(raw), 1), BpeLearnConfig{});
  std::vector<std::string> texts;
  for (const auto& t : raw) texts.push_back(t.text);

  const auto& emoji = EmojiTable::builtin();
  encode_raw_tweets(texts, table, emoji, 4);  // warm-up
  std::size_t done = 0;
  const auto t0 = Clock::now();
  while (seconds_since(t0) < 1.0) {
    done += encode_raw_tweets(texts, table, emoji, 4).size();
  }
  const double rate = static_cast<double>(done) / seconds_since(t0);
  return {rate >= 50000.0, fmt("tweets_per_s=%.0f workers=4 hardware_threads=%u target=50000 (not gated)", rate,
                               std::max(1u, std::thread::hardware_concurrency()))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"block-count", block_count}, {"bpe-oracle", bpe_oracle},       {"metric-oracles", metric_oracles},
      {"normalization", normalization}, {"masking", masking},         {"protocol", protocol},
      {"smoke", smoke},             {"throughput", throughput}};
  int gated_failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && i < 7) ++gated_failures;
  }
  return gated_failures == 0 ? 0 : 1;
}
