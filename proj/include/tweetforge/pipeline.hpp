#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetforge/bpe.hpp"
#include "tweetforge/corpus.hpp"
#include "tweetforge/mask.hpp"
#include "tweetforge/normalize.hpp"
#include "tweetforge/pack.hpp"

namespace tweetforge::pipeline {

// A stage failed at run time (CLI exit code 1).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Stages read and write line-delimited records in chunks, so memory stays
// bounded by `chunk_size` tweets while each chunk is processed in parallel.

struct IngestOptions {
  IngestFormat input_format = IngestFormat::jsonl;
  IngestFormat output_format = IngestFormat::jsonl;
  FilterConfig filter;
  bool metadata_langid = false;  // trust record "lang" instead of the n-gram model
  int workers = 1;
  std::size_t chunk_size = 1 << 14;
};
CorpusStats ingest(std::istream& in, std::ostream& out, const IngestOptions& opt);

struct NormalizeOptions {
  IngestFormat format = IngestFormat::jsonl;
  NormMode mode = NormMode::soft;
  std::vector<LexNormDict> dicts;
  const EmojiTable* emoji = nullptr;  // builtin when null
  int workers = 1;
  std::size_t chunk_size = 1 << 14;
};
struct NormalizeStats {
  std::uint64_t tweets = 0;
  std::uint64_t tokens = 0;
  std::uint64_t changed_tokens = 0;
  std::uint64_t unknown_emoji = 0;
  std::uint64_t malformed_records = 0;
  void write_report(std::ostream& out) const;
};
// Output text is the space-joined normalized token sequence.
NormalizeStats normalize(std::istream& in, std::ostream& out, const NormalizeOptions& opt);

// Learns from whitespace-tokenized text (normally the normalize output).
MergeTable learn(std::istream& in, IngestFormat format, const BpeLearnConfig& cfg,
                 BpeLearnStats* stats = nullptr);

struct ApplyOptions {
  IngestFormat format = IngestFormat::jsonl;
  bool ids = false;  // write vocabulary ids instead of pieces
  int workers = 1;
  std::size_t chunk_size = 1 << 14;
};
struct ApplyStats {
  std::uint64_t tweets = 0;
  std::uint64_t words = 0;
  std::uint64_t subwords = 0;
  std::uint64_t unk = 0;
  void write_report(std::ostream& out) const;
};
// jsonl input gives `id<TAB>encoding` lines; text input gives encodings only.
ApplyStats apply(std::istream& in, std::ostream& out, const MergeTable& table, const ApplyOptions& opt);

struct PackOptions {
  PackConfig pack;
  std::uint64_t shard_size = 1024;
};
// Reads `id<TAB>ids` (or bare id lists, numbered by line) and writes block shards.
PackStats pack(std::istream& encoded, const std::filesystem::path& out_dir, const PackOptions& opt);
void write_pack_report(std::ostream& out, const PackStats& s);

struct MaskOptions {
  MaskPolicy policy;
  std::uint32_t epoch = 0;
  std::size_t vocab_size = 0;
  std::uint64_t shard_size = 1024;
  int workers = 1;
};
struct MaskStats {
  std::uint64_t examples = 0;
  std::uint64_t labels = 0;
  std::uint64_t masked = 0;
  std::uint64_t randomized = 0;
  std::uint64_t kept = 0;
  void write_report(std::ostream& out) const;
};
MaskStats mask(const std::filesystem::path& blocks_dir, const std::filesystem::path& out_dir,
               const MaskOptions& opt);

// ---------------------------------------------------------------------------
// Declarative runs

struct EvalTaskData {
  std::filesystem::path train;
  std::filesystem::path test;
  std::size_t tag_column = 1;
};

struct EvalConfig {
  std::vector<std::string> tasks;  // pos, ner, sentiment, irony
  std::vector<std::uint64_t> seeds{1};
  double valid_fraction = 0.1;
  bool regex_override = true;
  std::map<std::string, EvalTaskData> data;
};

struct PipelineConfig {
  std::string preset = "pretrain";  // pretrain, downstream, eval
  std::filesystem::path input;
  std::filesystem::path output_dir;
  int workers = 1;

  IngestFormat input_format = IngestFormat::jsonl;
  FilterConfig filter;
  bool metadata_langid = false;

  NormMode norm_mode = NormMode::soft;
  std::vector<std::filesystem::path> lexnorm;

  BpeLearnConfig bpe;
  std::optional<std::filesystem::path> merges;  // reuse instead of learning

  PackConfig pack;
  std::uint64_t shard_size = 1024;

  MaskPolicy mask;
  std::uint32_t epochs = 1;

  EvalConfig eval;

  std::vector<std::string> stages() const;
  void validate() const;  // ConfigError naming the offending field
};

inline constexpr const char* kPresets[] = {"pretrain", "downstream", "eval"};

// Defaults for a preset; eval points at the bundled micro datasets.
PipelineConfig preset_config(const std::string& preset);

/// INI file with sections [pipeline] [ingest] [normalize] [bpe] [pack] [mask]
/// [eval]. Relative paths resolve against `base_dir`. Unknown sections or keys
/// are errors.
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

struct RunSummary {
  std::vector<std::string> stages;
  std::vector<std::filesystem::path> outputs;
};

// Executes the preset's stages; all outputs land in cfg.output_dir.
RunSummary run(const PipelineConfig& cfg, std::ostream& log);

}  // namespace tweetforge::pipeline
