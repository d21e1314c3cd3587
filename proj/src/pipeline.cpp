#include "tweetforge/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tweetforge/eval/conll.hpp"
#include "tweetforge/eval/metrics.hpp"
#include "tweetforge/eval/predictors.hpp"
#include "tweetforge/eval/protocol.hpp"
#include "tweetforge/eval/report.hpp"
#include "tweetforge/kernels.hpp"
#include "tweetforge/langid.hpp"
#include "tweetforge/shard.hpp"

#ifndef TWEETFORGE_DATA_DIR
#define TWEETFORGE_DATA_DIR "data"
#endif

namespace tweetforge::pipeline {

namespace fs = std::filesystem;

namespace {

template <class F>
void for_each_chunk(TweetReader& reader, std::size_t chunk_size, F&& f) {
  std::vector<RawTweet> buf;
  buf.reserve(std::min<std::size_t>(chunk_size, 1 << 16));
  while (auto t = reader.next()) {
    buf.push_back(std::move(*t));
    if (buf.size() >= chunk_size) {
      f(buf);
      buf.clear();
    }
  }
  if (!buf.empty()) f(buf);
}

void write_ids(std::ostream& out, std::span<const std::uint32_t> ids) {
  char buf[16];
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.put(' ');
    const auto r = std::to_chars(buf, buf + sizeof buf, ids[i]);
    out.write(buf, r.ptr - buf);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

CorpusStats ingest(std::istream& in, std::ostream& out, const IngestOptions& opt) {
  const TweetTokenizer tokenizer;
  const PassThroughIdentifier passthrough;
  const LanguageIdentifier& langid =
      opt.metadata_langid ? static_cast<const LanguageIdentifier&>(passthrough) : NgramLanguageModel::builtin();
  const CorpusFilter filter(opt.filter, tokenizer, langid);
  TweetReader reader(in, opt.input_format, tokenizer);
  CorpusStats stats;
  for_each_chunk(reader, opt.chunk_size, [&](const std::vector<RawTweet>& chunk) {
    auto r = filter_corpus(chunk, filter, opt.workers);
    for (const auto& t : r.kept) write_tweet(out, t, opt.output_format);
    stats.merge(r.stats);
  });
  stats.malformed_records = reader.malformed();
  if (!out) throw IoError("write failed");
  return stats;
}

void NormalizeStats::write_report(std::ostream& out) const {
  out << "tweets=" << tweets << '\n'
      << "tokens=" << tokens << '\n'
      << "changed_tokens=" << changed_tokens << '\n'
      << "unknown_emoji=" << unknown_emoji << '\n'
      << "malformed_records=" << malformed_records << '\n';
}

NormalizeStats normalize(std::istream& in, std::ostream& out, const NormalizeOptions& opt) {
  const EmojiTable& emoji = opt.emoji ? *opt.emoji : EmojiTable::builtin();
  const TweetTokenizer tokenizer(emoji);
  TweetReader reader(in, opt.format, tokenizer);
  NormalizeStats stats;
  for_each_chunk(reader, opt.chunk_size, [&](std::vector<RawTweet>& chunk) {
    const auto n = static_cast<std::ptrdiff_t>(chunk.size());
    std::uint64_t tokens = 0, changed = 0, unknown = 0;
#pragma omp parallel for num_threads(std::max(opt.workers, 1)) schedule(static) reduction(+ : tokens, changed, unknown)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      auto& t = chunk[static_cast<std::size_t>(i)];
      const auto norm = tweetforge::normalize(tokenizer.tokenize(t.text), opt.mode, emoji, opt.dicts);
      tokens += norm.tokens.size();
      changed += norm.change_log.size();
      unknown += norm.unknown_emoji;
      t.text = norm.joined();
    }
    for (const auto& t : chunk) write_tweet(out, t, opt.format);
    stats.tweets += chunk.size();
    stats.tokens += tokens;
    stats.changed_tokens += changed;
    stats.unknown_emoji += unknown;
  });
  stats.malformed_records = reader.malformed();
  if (!out) throw IoError("write failed");
  return stats;
}

MergeTable learn(std::istream& in, IngestFormat format, const BpeLearnConfig& cfg, BpeLearnStats* stats) {
  TweetReader reader(in, format);
  WordCounts counts;
  std::vector<std::string> texts;
  for_each_chunk(reader, 1 << 16, [&](const std::vector<RawTweet>& chunk) {
    texts.clear();
    for (const auto& t : chunk) texts.push_back(t.text);
    auto part = count_words(texts, cfg.workers);
    if (counts.empty()) {
      counts = std::move(part);
    } else {
      for (auto& [w, c] : part) counts[w] += c;
    }
  });
  return learn_bpe(counts, cfg, stats);
}

void ApplyStats::write_report(std::ostream& out) const {
  out << "tweets=" << tweets << '\n'
      << "words=" << words << '\n'
      << "subwords=" << subwords << '\n'
      << "unk=" << unk << '\n';
}

ApplyStats apply(std::istream& in, std::ostream& out, const MergeTable& table, const ApplyOptions& opt) {
  TweetReader reader(in, opt.format);
  ApplyStats stats;
  std::vector<std::string> texts;
  for_each_chunk(reader, opt.chunk_size, [&](const std::vector<RawTweet>& chunk) {
    texts.clear();
    for (const auto& t : chunk) texts.push_back(t.text);
    const auto encoded = encode_lines(texts, table, opt.workers);
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const auto& s = encoded[i];
      if (opt.format == IngestFormat::jsonl) out << chunk[i].id << '\t';
      if (opt.ids) {
        write_ids(out, s.ids);
      } else {
        out << s.joined();
      }
      out << '\n';
      stats.words += s.word_boundaries.size();
      stats.subwords += s.size();
      stats.unk += s.unk_count;
    }
    stats.tweets += chunk.size();
  });
  if (!out) throw IoError("write failed");
  return stats;
}

PackStats pack(std::istream& encoded, const fs::path& out_dir, const PackOptions& opt) {
  BlockPacker packer(opt.pack);
  std::vector<SequenceBlock> blocks;
  std::string line;
  std::vector<std::uint32_t> ids;
  std::size_t line_no = 0;
  while (std::getline(encoded, line)) {
    ++line_no;
    std::string_view v = line;
    std::string id = std::to_string(line_no);
    if (const auto tab = v.find('\t'); tab != std::string_view::npos) {
      id.assign(v.substr(0, tab));
      v.remove_prefix(tab + 1);
    }
    ids.clear();
    for_each_field(v, [&](std::string_view f) {
      std::uint32_t x = 0;
      const auto r = std::from_chars(f.data(), f.data() + f.size(), x);
      if (r.ec != std::errc() || r.ptr != f.data() + f.size())
        throw FormatError("line " + std::to_string(line_no) + ": '" + std::string(f) + "' is not an id");
      ids.push_back(x);
    });
    packer.add(id, ids);
    for (auto& b : packer.take()) blocks.push_back(std::move(b));
  }
  packer.finish();
  for (auto& b : packer.take()) blocks.push_back(std::move(b));
  write_shards(out_dir, blocks, opt.shard_size, static_cast<std::uint32_t>(opt.pack.block_length),
               opt.pack.specials);
  return packer.stats();
}

void write_pack_report(std::ostream& out, const PackStats& s) {
  out << "tweets=" << s.tweets << '\n'
      << "blocks=" << s.blocks << '\n'
      << "truncated=" << s.truncated << '\n'
      << "subword_ids=" << s.subword_ids << '\n'
      << "pad_ids=" << s.pad_ids << '\n';
}

void MaskStats::write_report(std::ostream& out) const {
  out << "examples=" << examples << '\n'
      << "labels=" << labels << '\n'
      << "action.mask=" << masked << '\n'
      << "action.random=" << randomized << '\n'
      << "action.keep=" << kept << '\n';
}

MaskStats mask(const fs::path& blocks_dir, const fs::path& out_dir, const MaskOptions& opt) {
  opt.policy.validate();
  const ShardManifest m = read_manifest(blocks_dir);
  const auto blocks = read_block_shards(blocks_dir);
  const auto examples = mask_blocks(blocks, opt.policy, opt.epoch, opt.vocab_size, opt.workers, m.specials);
  write_shards(out_dir, examples, opt.shard_size, m.block_length, opt.policy, opt.epoch, m.specials);
  MaskStats s;
  s.examples = examples.size();
  for (const auto& ex : examples) {
    s.labels += ex.labels.size();
    for (auto a : ex.actions) {
      s.masked += a == MaskAction::mask;
      s.randomized += a == MaskAction::random;
      s.kept += a == MaskAction::keep;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Config

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"pipeline", {"preset", "input", "output_dir", "workers"}},
      {"ingest",
       {"format", "min_tokens", "max_tokens", "target_lang", "drop_retweets", "keywords", "langid",
        "lang_min_confidence"}},
      {"normalize", {"mode", "lexnorm"}},
      {"bpe", {"target_vocab", "min_pair_freq", "merges"}},
      {"pack", {"block_length", "open_blocks", "shard_size"}},
      {"mask", {"fraction", "mask_prob", "random_prob", "keep_prob", "seed", "epochs"}},
      {"eval",
       {"tasks", "seeds", "valid_fraction", "regex_override", "pos_train", "pos_test", "pos_tag_column",
        "ner_train", "ner_test", "ner_tag_column", "sentiment_train", "sentiment_test", "irony_train",
        "irony_test"}},
  };
  return keys;
}

const std::set<std::string> kEvalTasks = {"pos", "ner", "sentiment", "irony"};

std::string trim(std::string_view s) {
  while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto comma = v.find(',', start);
    if (comma == std::string::npos) comma = v.size();
    auto item = trim(std::string_view(v).substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = comma + 1;
  }
  return out;
}

class Fields {
 public:
  Fields(const std::string& section, const boost::property_tree::ptree& tree) : section_(section), tree_(tree) {}

  std::optional<std::string> str(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }
  template <class T>
  void unsigned_int(const std::string& key, T& out) const {
    if (auto v = str(key)) {
      std::uint64_t x = 0;
      const auto r = std::from_chars(v->data(), v->data() + v->size(), x);
      if (r.ec != std::errc() || r.ptr != v->data() + v->size() || v->empty())
        throw error(key, "expected a non-negative integer, got '" + *v + "'");
      out = static_cast<T>(x);
    }
  }
  void real(const std::string& key, double& out) const {
    if (auto v = str(key)) {
      double x = 0;
      const auto r = std::from_chars(v->data(), v->data() + v->size(), x);
      if (r.ec != std::errc() || r.ptr != v->data() + v->size() || v->empty())
        throw error(key, "expected a number, got '" + *v + "'");
      out = x;
    }
  }
  void boolean(const std::string& key, bool& out) const {
    if (auto v = str(key)) {
      if (*v == "true" || *v == "yes" || *v == "1") {
        out = true;
      } else if (*v == "false" || *v == "no" || *v == "0") {
        out = false;
      } else {
        throw error(key, "expected true or false, got '" + *v + "'");
      }
    }
  }
  ConfigError error(const std::string& key, const std::string& msg) const {
    return ConfigError(section_ + "." + key + ": " + msg);
  }

 private:
  std::string section_;
  const boost::property_tree::ptree& tree_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

std::vector<std::string> PipelineConfig::stages() const {
  if (preset == "pretrain") return {"ingest", "normalize", "bpe-learn", "bpe-apply", "pack", "mask"};
  if (preset == "downstream") {
    if (merges) return {"normalize", "bpe-apply"};
    return {"normalize"};
  }
  return {"eval"};
}

void PipelineConfig::validate() const {
  if (std::find(std::begin(kPresets), std::end(kPresets), preset) == std::end(kPresets))
    throw ConfigError("pipeline.preset: unknown preset '" + preset + "'");
  if (preset != "eval" && input.empty()) throw ConfigError("pipeline.input: required for the " + preset + " preset");
  if (output_dir.empty()) throw ConfigError("pipeline.output_dir: required");
  if (workers < 1) throw ConfigError("pipeline.workers: must be at least 1");
  try {
    filter.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("ingest: ") + e.what());
  }
  if (norm_mode == NormMode::hard && lexnorm.empty())
    throw ConfigError("normalize.lexnorm: hard mode needs at least one dictionary");
  if (bpe.target_vocab <= SpecialIds{}.count) throw ConfigError("bpe.target_vocab: must exceed the special ids");
  if (bpe.min_pair_freq < 1) throw ConfigError("bpe.min_pair_freq: must be at least 1");
  try {
    pack.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("pack: ") + e.what());
  }
  if (shard_size < 1) throw ConfigError("pack.shard_size: must be at least 1");
  try {
    mask.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("mask: ") + e.what());
  }
  if (epochs < 1) throw ConfigError("mask.epochs: must be at least 1");
  if (preset == "eval") {
    if (eval.tasks.empty()) throw ConfigError("eval.tasks: at least one task is required");
    if (eval.seeds.empty()) throw ConfigError("eval.seeds: at least one seed is required");
    if (!(eval.valid_fraction > 0 && eval.valid_fraction < 1))
      throw ConfigError("eval.valid_fraction: must be within (0, 1)");
    for (const auto& t : eval.tasks) {
      if (!kEvalTasks.contains(t)) throw ConfigError("eval.tasks: unknown task '" + t + "'");
      auto it = eval.data.find(t);
      if (it == eval.data.end() || it->second.train.empty())
        throw ConfigError("eval." + t + "_train: required for task " + t);
      if (it->second.test.empty()) throw ConfigError("eval." + t + "_test: required for task " + t);
    }
  }
}

PipelineConfig preset_config(const std::string& preset) {
  PipelineConfig cfg;
  cfg.preset = preset;
  cfg.output_dir = "tweetforge-out";
  if (preset == "eval") {
    const fs::path fixtures = fs::path(TWEETFORGE_DATA_DIR) / "fixtures";
    cfg.eval.tasks = {"pos", "ner", "sentiment", "irony"};
    cfg.eval.seeds = {1, 2, 3, 4, 5};
    cfg.eval.data["pos"] = {fixtures / "pos_train.conll", fixtures / "pos_test.conll", 1};
    cfg.eval.data["ner"] = {fixtures / "ner_train.conll", fixtures / "ner_test.conll", 1};
    cfg.eval.data["sentiment"] = {fixtures / "sentiment_train.tsv", fixtures / "sentiment_test.tsv", 1};
    cfg.eval.data["irony"] = {fixtures / "irony_train.tsv", fixtures / "irony_test.tsv", 1};
  }
  return cfg;
}

PipelineConfig parse_config(std::istream& in, const fs::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty()) throw ConfigError(section + ": keys must belong to a [section]");
      throw ConfigError("[" + section + "]: unknown section");
    }
    for (const auto& [key, unused] : body)
      if (!it->second.contains(key)) throw ConfigError(section + "." + key + ": unknown key");
  }
  const boost::property_tree::ptree empty;
  auto section = [&](const char* name) {
    auto child = tree.get_child_optional(name);
    return Fields(name, child ? *child : empty);
  };

  const Fields p = section("pipeline");
  PipelineConfig cfg = preset_config(p.str("preset").value_or("pretrain"));
  if (auto v = p.str("input")) cfg.input = resolve(base_dir, *v);
  if (auto v = p.str("output_dir")) cfg.output_dir = resolve(base_dir, *v);
  p.unsigned_int("workers", cfg.workers);

  const Fields ing = section("ingest");
  if (auto v = ing.str("format")) {
    auto f = parse_ingest_format(*v);
    if (!f) throw ing.error("format", "expected jsonl or text, got '" + *v + "'");
    cfg.input_format = *f;
  }
  ing.unsigned_int("min_tokens", cfg.filter.min_tokens);
  ing.unsigned_int("max_tokens", cfg.filter.max_tokens);
  if (auto v = ing.str("target_lang")) cfg.filter.target_lang = *v;
  ing.boolean("drop_retweets", cfg.filter.drop_retweets);
  if (auto v = ing.str("keywords")) cfg.filter.keywords = split_list(*v);
  if (auto v = ing.str("langid")) {
    if (*v != "builtin" && *v != "metadata") throw ing.error("langid", "expected builtin or metadata");
    cfg.metadata_langid = *v == "metadata";
  }
  ing.real("lang_min_confidence", cfg.filter.lang_min_confidence);

  const Fields norm = section("normalize");
  if (auto v = norm.str("mode")) {
    if (*v != "soft" && *v != "hard") throw norm.error("mode", "expected soft or hard, got '" + *v + "'");
    cfg.norm_mode = *v == "hard" ? NormMode::hard : NormMode::soft;
  }
  if (auto v = norm.str("lexnorm"))
    for (const auto& item : split_list(*v)) cfg.lexnorm.push_back(resolve(base_dir, item));

  const Fields b = section("bpe");
  b.unsigned_int("target_vocab", cfg.bpe.target_vocab);
  b.unsigned_int("min_pair_freq", cfg.bpe.min_pair_freq);
  if (auto v = b.str("merges")) cfg.merges = resolve(base_dir, *v);

  const Fields pk = section("pack");
  pk.unsigned_int("block_length", cfg.pack.block_length);
  pk.unsigned_int("open_blocks", cfg.pack.open_blocks);
  pk.unsigned_int("shard_size", cfg.shard_size);

  const Fields m = section("mask");
  m.real("fraction", cfg.mask.mask_fraction);
  m.real("mask_prob", cfg.mask.mask_prob);
  m.real("random_prob", cfg.mask.random_prob);
  m.real("keep_prob", cfg.mask.keep_prob);
  m.unsigned_int("seed", cfg.mask.seed);
  m.unsigned_int("epochs", cfg.epochs);

  const Fields e = section("eval");
  if (auto v = e.str("tasks")) cfg.eval.tasks = split_list(*v);
  if (auto v = e.str("seeds")) {
    cfg.eval.seeds.clear();
    for (const auto& s : split_list(*v)) {
      std::uint64_t x = 0;
      const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw e.error("seeds", "'" + s + "' is not a seed");
      cfg.eval.seeds.push_back(x);
    }
  }
  e.real("valid_fraction", cfg.eval.valid_fraction);
  e.boolean("regex_override", cfg.eval.regex_override);
  for (const auto& t : kEvalTasks) {
    auto& d = cfg.eval.data[t];
    if (auto v = e.str(t + "_train")) d.train = resolve(base_dir, *v);
    if (auto v = e.str(t + "_test")) d.test = resolve(base_dir, *v);
    if (t == "pos" || t == "ner") e.unsigned_int(t + "_tag_column", d.tag_column);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.parent_path());
}

// ---------------------------------------------------------------------------
// Run

namespace {

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

template <class F>
void stage(const std::string& name, std::ostream& log, RunSummary& summary, F&& f) {
  log << "[" << name << "] start\n";
  try {
    f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
  summary.stages.push_back(name);
  log << "[" << name << "] done\n";
}

void write_eval_reports(const fs::path& dir, const std::vector<eval::MetricReport>& reports,
                        RunSummary& summary) {
  fs::create_directories(dir);
  for (const auto& r : reports) {
    const std::string stem = "seed-" + std::to_string(r.run_seed);
    auto txt = open_out(dir / (stem + ".txt"));
    eval::write_report_text(txt, r);
    auto js = open_out(dir / (stem + ".json"));
    js << eval::report_to_json(r) << '\n';
    summary.outputs.push_back(dir / (stem + ".txt"));
  }
  const auto agg = eval::aggregate_runs(reports);
  auto txt = open_out(dir / "aggregate.txt");
  eval::write_aggregate_text(txt, agg);
  auto js = open_out(dir / "aggregate.json");
  js << eval::aggregate_to_json(agg) << '\n';
  summary.outputs.push_back(dir / "aggregate.txt");
}

void run_eval(const PipelineConfig& cfg, std::ostream& log, RunSummary& summary) {
  const fs::path root = cfg.output_dir / "eval";
  for (const auto& task : cfg.eval.tasks) {
    const auto& data = cfg.eval.data.at(task);
    if (task == "pos" || task == "ner") {
      const eval::ColumnSpec spec{0, data.tag_column, task == "ner"};
      const auto train = eval::load_conll(data.train, spec).sentences;
      const auto test = eval::load_conll(data.test, spec).sentences;
      std::vector<eval::MetricReport> main, surface;
      for (auto seed : cfg.eval.seeds) {
        auto [fit, valid] = eval::split_train_valid<eval::TaggedSequence>(train, cfg.eval.valid_fraction, seed);
        const auto tagger = eval::MftTagger::train(fit);
        auto pred = tagger.predict(test);
        if (task == "pos") {
          auto r = eval::pos_accuracy(test, pred, cfg.eval.regex_override);
          r.run_seed = static_cast<std::int64_t>(seed);
          main.push_back(std::move(r));
        } else {
          for (auto& s : pred) eval::repair_bio(s.tags);
          const auto gold_spans = eval::extract_spans(test);
          const auto pred_spans = eval::extract_spans(pred);
          auto e = eval::ner_f1(gold_spans, pred_spans, eval::NerLevel::entity);
          auto s = eval::ner_f1(gold_spans, pred_spans, eval::NerLevel::surface);
          e.run_seed = s.run_seed = static_cast<std::int64_t>(seed);
          main.push_back(std::move(e));
          surface.push_back(std::move(s));
        }
        log << "[eval] " << task << " seed " << seed << ": " << fit.size() << " train / " << valid.size()
            << " valid sentences\n";
      }
      write_eval_reports(root / (task == "pos" ? "pos" : "ner-entity"), main, summary);
      if (task == "ner") write_eval_reports(root / "ner-surface", surface, summary);
    } else {
      const auto scheme = task == "sentiment" ? eval::ClassScheme::semeval17 : eval::ClassScheme::semeval18;
      const auto train = eval::load_labeled_docs(data.train);
      const auto test = eval::load_labeled_docs(data.test);
      std::vector<std::string> gold;
      for (const auto& d : test) gold.push_back(d.gold_label);
      std::vector<eval::MetricReport> reports;
      for (auto seed : cfg.eval.seeds) {
        auto [fit, valid] = eval::split_train_valid<eval::LabeledDoc>(train, cfg.eval.valid_fraction, seed);
        std::vector<std::string> labels;
        for (const auto& d : fit) labels.push_back(d.gold_label);
        const auto model = eval::MajorityLabel::train(labels);
        auto r = eval::classification_metrics(gold, model.predict(gold.size()), scheme);
        r.run_seed = static_cast<std::int64_t>(seed);
        reports.push_back(std::move(r));
        log << "[eval] " << task << " seed " << seed << ": " << fit.size() << " train / " << valid.size()
            << " valid documents\n";
      }
      write_eval_reports(root / task, reports, summary);
    }
  }
}

}  // namespace

RunSummary run(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  RunSummary summary;
  fs::create_directories(cfg.output_dir);
  const fs::path& out = cfg.output_dir;

  if (cfg.preset == "eval") {
    stage("eval", log, summary, [&] { run_eval(cfg, log, summary); });
    return summary;
  }

  std::vector<LexNormDict> dicts;
  if (cfg.norm_mode == NormMode::hard) {
    for (const auto& p : cfg.lexnorm) dicts.push_back(load_lexnorm_dict(p));
  }

  if (cfg.preset == "downstream") {
    const bool jsonl = cfg.input_format == IngestFormat::jsonl;
    const fs::path normalized = out / (jsonl ? "normalized.jsonl" : "normalized.txt");
    stage("normalize", log, summary, [&] {
      auto in = open_in(cfg.input);
      auto o = open_out(normalized);
      NormalizeOptions opt{cfg.input_format, cfg.norm_mode, dicts, nullptr, cfg.workers};
      const auto s = normalize(in, o, opt);
      auto st = open_out(out / "normalize.stats");
      s.write_report(st);
      summary.outputs.push_back(normalized);
    });
    if (cfg.merges) {
      stage("bpe-apply", log, summary, [&] {
        const auto table = load_merges(*cfg.merges);
        auto in = open_in(normalized);
        auto o = open_out(out / "encoded.txt");
        const auto s = apply(in, o, table, ApplyOptions{cfg.input_format, false, cfg.workers});
        auto st = open_out(out / "apply.stats");
        s.write_report(st);
        summary.outputs.push_back(out / "encoded.txt");
      });
    }
    return summary;
  }

  // pretrain
  CorpusStats corpus;
  stage("ingest", log, summary, [&] {
    auto in = open_in(cfg.input);
    auto o = open_out(out / "corpus.jsonl");
    IngestOptions opt{cfg.input_format, IngestFormat::jsonl, cfg.filter, cfg.metadata_langid, cfg.workers};
    corpus = ingest(in, o, opt);
    auto st = open_out(out / "ingest.stats");
    corpus.write_report(st);
    summary.outputs.push_back(out / "corpus.jsonl");
    log << "[ingest] kept " << corpus.tweets_kept << " of " << corpus.tweets_in << " tweets\n";
  });
  stage("normalize", log, summary, [&] {
    auto in = open_in(out / "corpus.jsonl");
    auto o = open_out(out / "normalized.jsonl");
    NormalizeOptions opt{IngestFormat::jsonl, cfg.norm_mode, dicts, nullptr, cfg.workers};
    const auto s = normalize(in, o, opt);
    auto st = open_out(out / "normalize.stats");
    s.write_report(st);
    summary.outputs.push_back(out / "normalized.jsonl");
  });
  MergeTable table;
  stage("bpe-learn", log, summary, [&] {
    if (cfg.merges) {
      table = load_merges(*cfg.merges);
      log << "[bpe-learn] reusing " << cfg.merges->string() << "\n";
      return;
    }
    auto in = open_in(out / "normalized.jsonl");
    BpeLearnConfig bc = cfg.bpe;
    bc.workers = cfg.workers;
    BpeLearnStats ls;
    table = learn(in, IngestFormat::jsonl, bc, &ls);
    save_merges(table, out / "merges.txt");
    summary.outputs.push_back(out / "merges.txt");
    log << "[bpe-learn] " << table.merges().size() << " merges, vocabulary " << table.vocab_size() << "\n";
  });
  stage("bpe-apply", log, summary, [&] {
    auto in = open_in(out / "normalized.jsonl");
    auto o = open_out(out / "encoded.tsv");
    const auto s = apply(in, o, table, ApplyOptions{IngestFormat::jsonl, true, cfg.workers});
    auto st = open_out(out / "apply.stats");
    s.write_report(st);
    corpus.subwords_total = s.subwords;
    auto cs = open_out(out / "corpus.stats");
    corpus.write_report(cs);
    summary.outputs.push_back(out / "encoded.tsv");
  });
  stage("pack", log, summary, [&] {
    auto in = open_in(out / "encoded.tsv");
    fs::remove_all(out / "blocks");
    const auto s = pack(in, out / "blocks", PackOptions{cfg.pack, cfg.shard_size});
    auto st = open_out(out / "pack.stats");
    write_pack_report(st, s);
    summary.outputs.push_back(out / "blocks" / kManifestName);
    log << "[pack] " << s.tweets << " tweets into " << s.blocks << " blocks\n";
  });
  stage("mask", log, summary, [&] {
    fs::remove_all(out / "masked");
    auto st = open_out(out / "mask.stats");
    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      const fs::path dir = out / "masked" / ("epoch-" + std::to_string(epoch));
      const auto s = mask(out / "blocks", dir, MaskOptions{cfg.mask, epoch, table.vocab_size(), cfg.shard_size, cfg.workers});
      st << "[epoch-" << epoch << "]\n";
      s.write_report(st);
      summary.outputs.push_back(dir / kManifestName);
    }
  });
  return summary;
}

}  // namespace tweetforge::pipeline
