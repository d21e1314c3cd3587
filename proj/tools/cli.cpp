#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tweetforge/bpe.hpp"
#include "tweetforge/corpus.hpp"
#include "tweetforge/eval/conll.hpp"
#include "tweetforge/eval/metrics.hpp"
#include "tweetforge/eval/protocol.hpp"
#include "tweetforge/eval/report.hpp"
#include "tweetforge/normalize.hpp"
#include "tweetforge/pipeline.hpp"
#include "tweetforge/shard.hpp"
#include "tweetforge/synth.hpp"
#include "tweetforge/tokenize.hpp"

namespace tweetforge::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  // shared
  std::string input = "-";
  std::string output = "-";
  std::string format = "jsonl";
  std::string stats;
  int workers = 1;

  // ingest
  std::string output_format;
  std::size_t min_tokens = 10;
  std::size_t max_tokens = 64;
  std::string lang = "en";
  bool keep_retweets = false;
  std::vector<std::string> keywords;
  std::string langid = "builtin";
  double min_confidence = 0.0;

  // normalize
  std::string mode = "soft";
  std::vector<std::string> lexnorm;
  std::string emoji_table;

  // tokenize
  bool classes = false;

  // bpe
  std::size_t vocab = 64000;
  std::uint64_t min_freq = 2;
  std::string merges;
  std::string vocab_file;
  bool ids = false;

  // pack / mask
  std::size_t block_length = 128;
  std::size_t open_blocks = 8;
  std::uint64_t shard_size = 1024;
  std::string blocks;
  std::size_t vocab_size = 0;
  std::uint32_t epoch = 0;
  std::uint64_t seed = 0;
  double fraction = 0.15;
  double mask_prob = 0.8;
  double random_prob = 0.1;
  double keep_prob = 0.1;

  // eval
  std::string task;
  std::string gold;
  std::string pred;
  std::string level = "entity";
  bool regex_override = false;
  std::size_t tag_column = 1;
  std::string json_out;

  // split
  double split_fraction = 0.1;
  std::string train_out;
  std::string valid_out;

  // aggregate
  std::vector<std::string> reports;

  // early-stop
  std::vector<double> scores;
  std::size_t patience = 5;

  // synth
  std::size_t tweets = 1000;
  double mean_words = 21.0;
  double retweet_rate = 0.04;
  double foreign_rate = 0.04;
  double short_rate = 0.03;
  double long_rate = 0.02;

  // run
  std::string config;
  std::string preset;
  std::string output_dir;
};

class App : public CLI::App {
 public:
  App() : CLI::App("tweetforge: tweet corpus preparation and evaluation toolkit", "tweetforge") {}
  Options o;
};

void add_io(CLI::App* sub, Options& o, bool with_format, const std::string& default_format = "jsonl") {
  sub->add_option("-i,--input", o.input, "Input file, '-' for stdin")->capture_default_str();
  sub->add_option("-o,--output", o.output, "Output file, '-' for stdout")->capture_default_str();
  if (with_format) {
    o.format = default_format;
    sub->add_option("--format", o.format, "Record format: jsonl or text")
        ->check(CLI::IsMember({"jsonl", "text"}))
        ->capture_default_str();
  }
}

void add_workers(CLI::App* sub, Options& o) {
  sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
}

void build(App& app) {
  Options& o = app.o;
  app.require_subcommand(1);
  app.fallthrough(false);

  auto* ingest = app.add_subcommand("ingest", "Read tweets, identify language and apply corpus filters");
  add_io(ingest, o, true);
  ingest->add_option("--output-format", o.output_format, "Output record format (defaults to --format)")
      ->check(CLI::IsMember({"jsonl", "text"}));
  ingest->add_option("--stats", o.stats, "Stats report path (default: <output>.stats unless stdout)");
  ingest->add_option("--min-tokens", o.min_tokens, "Minimum word tokens")->capture_default_str();
  ingest->add_option("--max-tokens", o.max_tokens, "Maximum word tokens")->capture_default_str();
  ingest->add_option("--lang", o.lang, "Target language code; empty disables the language filter")
      ->capture_default_str();
  ingest->add_flag("--keep-retweets", o.keep_retweets, "Do not drop retweets");
  ingest->add_option("--keywords", o.keywords, "Lowercase keywords; keep tweets containing any")->delimiter(',');
  ingest->add_option("--langid", o.langid, "Language identifier: builtin or metadata")
      ->check(CLI::IsMember({"builtin", "metadata"}))
      ->capture_default_str();
  ingest->add_option("--min-confidence", o.min_confidence, "Minimum language confidence")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_workers(ingest, o);

  auto* normalize = app.add_subcommand("normalize", "Soft or hard normalization of tweet text");
  add_io(normalize, o, true);
  normalize->add_option("--mode", o.mode, "soft or hard")->check(CLI::IsMember({"soft", "hard"}))->capture_default_str();
  normalize->add_option("--lexnorm", o.lexnorm, "Lexical normalization dictionaries, first match wins")->delimiter(',');
  normalize->add_option("--emoji-table", o.emoji_table, "Emoji alias table (default: bundled)");
  normalize->add_option("--stats", o.stats, "Stats report path");
  add_workers(normalize, o);

  auto* tokenize = app.add_subcommand("tokenize", "Tokenize text lines");
  add_io(tokenize, o, false);
  tokenize->add_flag("--classes", o.classes, "Append a tab and the comma-separated token classes");

  auto* learn = app.add_subcommand("bpe-learn", "Learn BPE merges from tokenized text");
  learn->add_option("-i,--input", o.input, "Tokenized input, '-' for stdin")->capture_default_str();
  learn->add_option("--format", o.format, "Record format: jsonl or text")->check(CLI::IsMember({"jsonl", "text"}));
  learn->add_option("-o,--output", o.merges, "Merges file to write")->required();
  learn->add_option("--vocab-out", o.vocab_file, "Vocabulary file (default: <merges>.vocab)");
  learn->add_option("--vocab", o.vocab, "Target vocabulary size including specials")->capture_default_str();
  learn->add_option("--min-freq", o.min_freq, "Minimum pair frequency to merge")->capture_default_str();
  add_workers(learn, o);

  auto* apply = app.add_subcommand("bpe-apply", "Segment tokenized text into subword pieces");
  add_io(apply, o, true);
  apply->add_option("--merges", o.merges, "Merges file")->required();
  apply->add_option("--vocab-file", o.vocab_file, "Vocabulary file (default: <merges>.vocab)");
  apply->add_flag("--ids", o.ids, "Write vocabulary ids instead of pieces");
  apply->add_option("--stats", o.stats, "Stats report path");
  add_workers(apply, o);

  auto* pack = app.add_subcommand("pack", "Pack encoded tweets into fixed-length blocks");
  pack->add_option("-i,--input", o.input, "Encoded ids (id<TAB>ids per line), '-' for stdin")->capture_default_str();
  pack->add_option("-o,--output", o.output_dir, "Output shard directory")->required();
  pack->add_option("--block-length", o.block_length, "Block length")->capture_default_str();
  pack->add_option("--open-blocks", o.open_blocks, "Open blocks for first-fit placement (1 = next-fit)")
      ->capture_default_str();
  pack->add_option("--shard-size", o.shard_size, "Blocks per shard")->capture_default_str();
  pack->add_option("--stats", o.stats, "Stats report path");

  auto* mask = app.add_subcommand("mask", "Sample MLM masks for packed blocks");
  mask->add_option("--blocks", o.blocks, "Block shard directory")->required();
  mask->add_option("-o,--output", o.output_dir, "Output shard directory")->required();
  auto* vs = mask->add_option("--vocab-size", o.vocab_size, "Vocabulary size for random replacement ids");
  auto* mm = mask->add_option("--merges", o.merges, "Merges file whose vocabulary size to use");
  vs->excludes(mm);
  mask->add_option("--epoch", o.epoch, "Epoch number (dynamic masking)")->capture_default_str();
  mask->add_option("--seed", o.seed, "Mask seed")->capture_default_str();
  mask->add_option("--fraction", o.fraction, "Fraction of eligible positions to select")->capture_default_str();
  mask->add_option("--mask-prob", o.mask_prob, "Probability of the mask action")->capture_default_str();
  mask->add_option("--random-prob", o.random_prob, "Probability of the random-id action")->capture_default_str();
  mask->add_option("--keep-prob", o.keep_prob, "Probability of the keep action")->capture_default_str();
  mask->add_option("--shard-size", o.shard_size, "Examples per shard")->capture_default_str();
  mask->add_option("--stats", o.stats, "Stats report path");
  add_workers(mask, o);

  auto* ev = app.add_subcommand("eval", "Score predictions against gold data");
  ev->add_option("--task", o.task, "pos, ner, sentiment or irony")
      ->check(CLI::IsMember({"pos", "ner", "sentiment", "irony"}))
      ->required();
  ev->add_option("--gold", o.gold, "Gold file (CoNLL, or id<TAB>label<TAB>text)")->required();
  ev->add_option("--pred", o.pred, "Predictions (CoNLL, or one label per line)")->required();
  ev->add_option("--level", o.level, "NER level: entity or surface")
      ->check(CLI::IsMember({"entity", "surface"}))
      ->capture_default_str();
  ev->add_flag("--regex-override", o.regex_override, "Force regex-taggable POS positions");
  ev->add_option("--tag-column", o.tag_column, "CoNLL tag column")->capture_default_str();
  ev->add_option("--seed", o.seed, "Run seed recorded in the report")->capture_default_str();
  ev->add_option("-o,--output", o.output, "Key=value report, '-' for stdout")->capture_default_str();
  ev->add_option("--json-out", o.json_out, "JSON report path");

  auto* split = app.add_subcommand("split", "Seeded train/validation split");
  split->add_option("-i,--input", o.input, "Input file, '-' for stdin")->capture_default_str();
  split->add_option("--format", o.format, "Item format: lines, tsv or conll")
      ->check(CLI::IsMember({"lines", "tsv", "conll"}));
  split->add_option("--fraction", o.split_fraction, "Validation fraction")->capture_default_str();
  split->add_option("--seed", o.seed, "Shuffle seed")->capture_default_str();
  split->add_option("--train-out", o.train_out, "Training part output")->required();
  split->add_option("--valid-out", o.valid_out, "Validation part output")->required();

  auto* agg = app.add_subcommand("aggregate", "Mean and standard deviation over run reports");
  agg->add_option("reports", o.reports, "Report files (key=value or JSON)")->required();
  agg->add_option("-o,--output", o.output, "Key=value aggregate, '-' for stdout")->capture_default_str();
  agg->add_option("--json-out", o.json_out, "JSON aggregate path");

  auto* es = app.add_subcommand("early-stop", "Best and stopping epoch for validation scores");
  es->add_option("--scores", o.scores, "Per-epoch validation scores")->delimiter(',')->required();
  es->add_option("--patience", o.patience, "Epochs without improvement before stopping")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic tweet corpus");
  synth->add_option("-o,--output", o.output, "Output JSONL, '-' for stdout")->capture_default_str();
  synth->add_option("--tweets", o.tweets, "Number of tweets")->capture_default_str();
  synth->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  synth->add_option("--mean-words", o.mean_words, "Mean plain words per tweet")->capture_default_str();
  synth->add_option("--retweet-rate", o.retweet_rate, "Share of retweets")->capture_default_str();
  synth->add_option("--foreign-rate", o.foreign_rate, "Share of Spanish/French tweets")->capture_default_str();
  synth->add_option("--short-rate", o.short_rate, "Share of too-short tweets")->capture_default_str();
  synth->add_option("--long-rate", o.long_rate, "Share of too-long tweets")->capture_default_str();

  auto* run = app.add_subcommand("run", "Run a preset pipeline from a config file");
  run->add_option("-c,--config", o.config, "INI config file");
  run->add_option("--preset", o.preset, "pretrain, downstream or eval (overrides the config)")
      ->check(CLI::IsMember({"pretrain", "downstream", "eval"}));
  run->add_option("--input", o.input, "Input corpus (overrides the config)");
  run->add_option("--output-dir", o.output_dir, "Output directory (overrides the config)");
  run->add_option("--workers", o.workers, "Worker threads (overrides the config)")->check(CLI::Range(1, 1024));
}

class Input {
 public:
  Input(const std::string& path, std::istream& fallback) {
    if (path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot open " + path);
      stream_ = &file_;
    }
  }
  std::istream& get() { return *stream_; }

 private:
  std::ifstream file_;
  std::istream* stream_;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }
  void close() {
    stream_->flush();
    if (!*stream_) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string stats_path(const Options& o) {
  if (!o.stats.empty()) return o.stats;
  return o.output == "-" ? std::string() : o.output + ".stats";
}

template <class Stats>
void write_stats(const std::string& path, const Stats& s) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  s.write_report(f);
}

IngestFormat fmt(const std::string& s) { return s == "text" ? IngestFormat::text : IngestFormat::jsonl; }

MergeTable load_table(const Options& o) {
  return load_merges(o.merges, o.vocab_file.empty() ? fs::path() : fs::path(o.vocab_file));
}

int cmd_ingest(const Options& o, const Streams& io) {
  pipeline::IngestOptions opt;
  opt.input_format = fmt(o.format);
  opt.output_format = o.output_format.empty() ? opt.input_format : fmt(o.output_format);
  opt.filter.min_tokens = o.min_tokens;
  opt.filter.max_tokens = o.max_tokens;
  opt.filter.target_lang = o.lang;
  opt.filter.drop_retweets = !o.keep_retweets;
  if (!o.keywords.empty()) opt.filter.keywords = o.keywords;
  opt.filter.lang_min_confidence = o.min_confidence;
  opt.filter.validate();
  opt.metadata_langid = o.langid == "metadata";
  opt.workers = o.workers;
  Input in(o.input, *io.in);
  Output out(o.output, *io.out);
  const auto stats = pipeline::ingest(in.get(), out.get(), opt);
  out.close();
  write_stats(stats_path(o), stats);
  return 0;
}

int cmd_normalize(const Options& o, const Streams& io) {
  pipeline::NormalizeOptions opt;
  opt.format = fmt(o.format);
  opt.mode = o.mode == "hard" ? NormMode::hard : NormMode::soft;
  if (opt.mode == NormMode::hard && o.lexnorm.empty())
    throw ConfigError("--mode hard needs at least one --lexnorm dictionary");
  for (const auto& p : o.lexnorm) opt.dicts.push_back(load_lexnorm_dict(p));
  std::optional<EmojiTable> table;
  if (!o.emoji_table.empty()) {
    table = EmojiTable::load(o.emoji_table);
    opt.emoji = &*table;
  }
  opt.workers = o.workers;
  Input in(o.input, *io.in);
  Output out(o.output, *io.out);
  const auto stats = pipeline::normalize(in.get(), out.get(), opt);
  out.close();
  write_stats(stats_path(o), stats);
  return 0;
}

int cmd_tokenize(const Options& o, const Streams& io) {
  Input in(o.input, *io.in);
  Output out(o.output, *io.out);
  const TweetTokenizer tokenizer;
  std::string line;
  while (std::getline(in.get(), line)) {
    const auto seq = tokenizer.tokenize(line);
    out.get() << seq.joined();
    if (o.classes) {
      out.get() << '\t';
      for (std::size_t i = 0; i < seq.size(); ++i) out.get() << (i ? "," : "") << to_string(seq.tokens[i].cls);
    }
    out.get() << '\n';
  }
  out.close();
  return 0;
}

int cmd_bpe_learn(const Options& o, const Streams& io, const CLI::App& sub) {
  BpeLearnConfig cfg;
  cfg.target_vocab = o.vocab;
  cfg.min_pair_freq = o.min_freq;
  cfg.workers = o.workers;
  Input in(o.input, *io.in);
  BpeLearnStats stats;
  const auto format = sub.count("--format") ? fmt(o.format) : IngestFormat::text;
  MergeTable table;
  try {
    table = pipeline::learn(in.get(), format, cfg, &stats);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  save_merges(table, o.merges, o.vocab_file.empty() ? fs::path() : fs::path(o.vocab_file));
  *io.err << "bpe-learn: " << table.merges().size() << " merges, vocabulary " << table.vocab_size()
          << ", skipped words " << stats.skipped_words << '\n';
  return 0;
}

int cmd_bpe_apply(const Options& o, const Streams& io, const CLI::App& sub) {
  const auto table = load_table(o);
  pipeline::ApplyOptions opt;
  opt.format = sub.count("--format") ? fmt(o.format) : IngestFormat::text;
  opt.ids = o.ids;
  opt.workers = o.workers;
  Input in(o.input, *io.in);
  Output out(o.output, *io.out);
  const auto stats = pipeline::apply(in.get(), out.get(), table, opt);
  out.close();
  write_stats(stats_path(o), stats);
  return 0;
}

int cmd_pack(const Options& o, const Streams& io) {
  pipeline::PackOptions opt;
  opt.pack.block_length = o.block_length;
  opt.pack.open_blocks = o.open_blocks;
  opt.pack.validate();
  opt.shard_size = o.shard_size;
  if (opt.shard_size == 0) throw ConfigError("--shard-size must be positive");
  Input in(o.input, *io.in);
  fs::remove_all(o.output_dir);
  const auto stats = pipeline::pack(in.get(), o.output_dir, opt);
  const std::string sp = o.stats.empty() ? (fs::path(o.output_dir) / "pack.stats").string() : o.stats;
  std::ofstream f(sp, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + sp);
  pipeline::write_pack_report(f, stats);
  return 0;
}

int cmd_mask(const Options& o, const Streams&) {
  pipeline::MaskOptions opt;
  opt.policy = MaskPolicy{o.fraction, o.mask_prob, o.random_prob, o.keep_prob, o.seed};
  opt.policy.validate();
  opt.epoch = o.epoch;
  opt.shard_size = o.shard_size;
  opt.workers = o.workers;
  if (!o.merges.empty()) {
    opt.vocab_size = load_table(o).vocab_size();
  } else if (o.vocab_size > 0) {
    opt.vocab_size = o.vocab_size;
  } else {
    throw ConfigError("one of --vocab-size or --merges is required");
  }
  if (opt.shard_size == 0) throw ConfigError("--shard-size must be positive");
  fs::remove_all(o.output_dir);
  const auto stats = pipeline::mask(o.blocks, o.output_dir, opt);
  const std::string sp = o.stats.empty() ? (fs::path(o.output_dir) / "mask.stats").string() : o.stats;
  write_stats(sp, stats);
  return 0;
}

int cmd_eval(const Options& o, const Streams& io) {
  eval::MetricReport report;
  if (o.task == "pos" || o.task == "ner") {
    const eval::ColumnSpec spec{0, o.tag_column, o.task == "ner"};
    const auto gold = eval::load_conll(o.gold, spec);
    const auto pred = eval::load_conll(o.pred, spec);
    if (o.task == "pos") {
      report = eval::pos_accuracy(gold.sentences, pred.sentences, o.regex_override);
    } else {
      if (gold.sentences.size() != pred.sentences.size())
        throw FormatError("gold and predictions differ in sentence count");
      report = eval::ner_f1(eval::extract_spans(gold.sentences), eval::extract_spans(pred.sentences),
                            *eval::parse_ner_level(o.level));
      if (gold.bio_repairs) report.warnings.push_back("gold BIO repairs: " + std::to_string(gold.bio_repairs));
      if (pred.bio_repairs) report.warnings.push_back("prediction BIO repairs: " + std::to_string(pred.bio_repairs));
    }
  } else {
    const auto docs = eval::load_labeled_docs(o.gold);
    std::vector<std::string> gold;
    for (const auto& d : docs) gold.push_back(d.gold_label);
    const auto pred = eval::load_labels(o.pred);
    report = eval::classification_metrics(
        gold, pred, o.task == "sentiment" ? eval::ClassScheme::semeval17 : eval::ClassScheme::semeval18);
  }
  report.run_seed = static_cast<std::int64_t>(o.seed);
  for (const auto& w : report.warnings) *io.err << "eval: warning: " << w << '\n';
  Output out(o.output, *io.out);
  eval::write_report_text(out.get(), report);
  out.close();
  if (!o.json_out.empty()) {
    Output js(o.json_out, *io.out);
    js.get() << eval::report_to_json(report) << '\n';
    js.close();
  }
  return 0;
}

int cmd_split(const Options& o, const Streams& io, const CLI::App& sub) {
  const std::string format = sub.count("--format") ? o.format : "lines";
  Input in(o.input, *io.in);
  Output train(o.train_out, *io.out);
  Output valid(o.valid_out, *io.out);
  if (format == "conll") {
    const auto data = eval::parse_conll(in.get(), eval::ColumnSpec{0, 1, false}, o.input);
    auto [t, v] = eval::split_train_valid<eval::TaggedSequence>(data.sentences, o.split_fraction, o.seed);
    eval::write_conll(train.get(), t);
    eval::write_conll(valid.get(), v);
  } else {
    std::vector<std::string> items;
    std::string line;
    while (std::getline(in.get(), line))
      if (!line.empty()) items.push_back(line);
    auto [t, v] = eval::split_train_valid<std::string>(items, o.split_fraction, o.seed);
    for (const auto& l : t) train.get() << l << '\n';
    for (const auto& l : v) valid.get() << l << '\n';
  }
  train.close();
  valid.close();
  return 0;
}

int cmd_aggregate(const Options& o, const Streams& io) {
  std::vector<eval::MetricReport> reports;
  for (const auto& p : o.reports) reports.push_back(eval::read_report(p));
  const auto agg = eval::aggregate_runs(reports);
  Output out(o.output, *io.out);
  eval::write_aggregate_text(out.get(), agg);
  out.close();
  if (!o.json_out.empty()) {
    Output js(o.json_out, *io.out);
    js.get() << eval::aggregate_to_json(agg) << '\n';
    js.close();
  }
  return 0;
}

int cmd_early_stop(const Options& o, const Streams& io) {
  const auto r = eval::early_stop(o.scores, o.patience);
  *io.out << "best_epoch=" << r.best_epoch << '\n' << "stop_epoch=" << r.stop_epoch << '\n';
  return 0;
}

int cmd_synth(const Options& o, const Streams& io) {
  SynthConfig cfg;
  cfg.tweets = o.tweets;
  cfg.seed = o.seed;
  cfg.mean_words = o.mean_words;
  cfg.retweet_rate = o.retweet_rate;
  cfg.foreign_rate = o.foreign_rate;
  cfg.short_rate = o.short_rate;
  cfg.long_rate = o.long_rate;
  for (double r : {cfg.retweet_rate, cfg.foreign_rate, cfg.short_rate, cfg.long_rate})
    if (r < 0 || r > 1) throw ConfigError("rates must be within [0, 1]");
  if (cfg.retweet_rate + cfg.foreign_rate + cfg.short_rate + cfg.long_rate > 1)
    throw ConfigError("rates must sum to at most 1");
  if (!(cfg.mean_words >= 1)) throw ConfigError("--mean-words must be at least 1");
  Output out(o.output, *io.out);
  for (const auto& t : synth_tweets(cfg)) write_tweet(out.get(), t, IngestFormat::jsonl);
  out.close();
  return 0;
}

int cmd_run(const Options& o, const Streams& io, const CLI::App& sub) {
  pipeline::PipelineConfig cfg;
  if (!o.config.empty()) {
    cfg = pipeline::load_config(o.config);
    if (!o.preset.empty() && o.preset != cfg.preset) {
      auto base = pipeline::preset_config(o.preset);
      base.input = cfg.input;
      base.output_dir = cfg.output_dir;
      cfg = std::move(base);
    }
  } else {
    if (o.preset.empty()) throw ConfigError("run needs --config or --preset");
    cfg = pipeline::preset_config(o.preset);
  }
  if (sub.count("--input")) cfg.input = o.input;
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (sub.count("--workers")) cfg.workers = o.workers;
  cfg.validate();
  const auto summary = pipeline::run(cfg, *io.err);
  for (const auto& p : summary.outputs) *io.out << p.string() << '\n';
  return 0;
}

int dispatch(App& app, const Streams& io) {
  const Options& o = app.o;
  auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (name == "ingest") return cmd_ingest(o, io);
    if (name == "normalize") return cmd_normalize(o, io);
    if (name == "tokenize") return cmd_tokenize(o, io);
    if (name == "bpe-learn") return cmd_bpe_learn(o, io, *sub);
    if (name == "bpe-apply") return cmd_bpe_apply(o, io, *sub);
    if (name == "pack") return cmd_pack(o, io);
    if (name == "mask") return cmd_mask(o, io);
    if (name == "eval") return cmd_eval(o, io);
    if (name == "split") return cmd_split(o, io, *sub);
    if (name == "aggregate") return cmd_aggregate(o, io);
    if (name == "early-stop") return cmd_early_stop(o, io);
    if (name == "synth") return cmd_synth(o, io);
    if (name == "run") return cmd_run(o, io, *sub);
  } catch (const ConfigError& e) {
    *io.err << "tweetforge " << name << ": configuration error: " << e.what() << '\n';
    return 2;
  } catch (const pipeline::StageError& e) {
    *io.err << "tweetforge " << name << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    *io.err << "tweetforge " << name << ": error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace

std::unique_ptr<CLI::App> make_app() {
  auto app = std::make_unique<App>();
  build(*app);
  return app;
}

int run(const std::vector<std::string>& args, const Streams& io) {
  App app;
  build(app);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    *io.out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    *io.out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // Subcommand help arrives as CallForHelp from the subcommand.
    *io.err << "tweetforge: " << e.what() << '\n' << "Run with --help for usage.\n";
    return 2;
  }
  return dispatch(app, io);
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, Streams{&std::cin, &std::cout, &std::cerr});
}

}  // namespace tweetforge::cli
