// Serial reference vs OpenMP kernels on a synthetic 10k-tweet corpus.
//
//   bench_pipeline [benchmark flags] [--write-baseline=FILE] [--baseline=FILE] [--tolerance=0.25]
//
// --write-baseline records items/s per benchmark as JSON; --baseline compares
// against such a record and exits 1 if any benchmark slowed down by more than
// the tolerance (a fraction of the baseline rate).

#include <benchmark/benchmark.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tweetforge/bpe.hpp"
#include "tweetforge/kernels.hpp"
#include "tweetforge/mask.hpp"
#include "tweetforge/normalize.hpp"
#include "tweetforge/pack.hpp"
#include "tweetforge/synth.hpp"

using namespace tweetforge;

namespace {

struct Corpus {
  std::vector<std::string> texts;
  std::vector<std::string> lines;  // soft-normalized
  MergeTable table;
  std::vector<SequenceBlock> blocks;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus c;
    SynthConfig sc;
    sc.tweets = 10000;
    sc.seed = 7;
    for (auto& t : synth_tweets(sc)) {
      c.lines.push_back(soft_normalize(tokenize(t.text)).joined());
      c.texts.push_back(std::move(t.text));
    }
    c.table = learn_bpe(count_words(c.lines, 1), BpeLearnConfig{});
    std::vector<PackInput> in;
    for (const auto& ids : encode_raw_tweets_serial(c.texts, c.table, EmojiTable::builtin()))
      in.push_back({std::to_string(in.size()), ids});
    c.blocks = pack_blocks(in, PackConfig{});
    return c;
  }();
  return c;
}

void BM_EncodeRawSerial(benchmark::State& st) {
  const auto& c = corpus();
  for (auto _ : st) benchmark::DoNotOptimize(encode_raw_tweets_serial(c.texts, c.table, EmojiTable::builtin()));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(c.texts.size()));
}
BENCHMARK(BM_EncodeRawSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EncodeRawOmp(benchmark::State& st) {
  const auto& c = corpus();
  const int w = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(encode_raw_tweets(c.texts, c.table, EmojiTable::builtin(), w));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(c.texts.size()));
}
BENCHMARK(BM_EncodeRawOmp)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CountWordsSerial(benchmark::State& st) {
  const auto& c = corpus();
  for (auto _ : st) benchmark::DoNotOptimize(count_words_serial(c.lines));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(c.lines.size()));
}
BENCHMARK(BM_CountWordsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CountWordsOmp(benchmark::State& st) {
  const auto& c = corpus();
  for (auto _ : st) benchmark::DoNotOptimize(count_words(c.lines, static_cast<int>(st.range(0))));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(c.lines.size()));
}
BENCHMARK(BM_CountWordsOmp)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_MaskSerial(benchmark::State& st) {
  const auto& c = corpus();
  for (auto _ : st) benchmark::DoNotOptimize(mask_blocks_serial(c.blocks, MaskPolicy{}, 0, c.table.vocab_size()));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(c.blocks.size()));
}
BENCHMARK(BM_MaskSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_MaskOmp(benchmark::State& st) {
  const auto& c = corpus();
  const int w = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(mask_blocks(c.blocks, MaskPolicy{}, 0, c.table.vocab_size(), w));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(c.blocks.size()));
}
BENCHMARK(BM_MaskOmp)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

// Console output plus a name -> items/s record.
class RecordingReporter : public benchmark::ConsoleReporter {
 public:
  std::map<std::string, double> rates;
  void ReportRuns(const std::vector<Run>& runs) override {
    for (const auto& r : runs) {
      auto it = r.counters.find("items_per_second");
      if (it != r.counters.end() && !r.error_occurred) rates[r.benchmark_name()] = it->second;
    }
    ConsoleReporter::ReportRuns(runs);
  }
};

bool take_flag(std::string_view arg, std::string_view name, std::string& value) {
  if (arg.substr(0, name.size()) != name || arg.size() <= name.size() || arg[name.size()] != '=') return false;
  value = arg.substr(name.size() + 1);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::string baseline, write_baseline, tolerance = "0.25";
  std::vector<char*> rest{argv[0]};
  for (int i = 1; i < argc; ++i) {
    if (take_flag(argv[i], "--baseline", baseline) || take_flag(argv[i], "--write-baseline", write_baseline) ||
        take_flag(argv[i], "--tolerance", tolerance))
      continue;
    rest.push_back(argv[i]);
  }
  int n = static_cast<int>(rest.size());
  benchmark::Initialize(&n, rest.data());
  if (benchmark::ReportUnrecognizedArguments(n, rest.data())) return 2;

  RecordingReporter reporter;
  benchmark::RunSpecifiedBenchmarks(&reporter);
  benchmark::Shutdown();

  if (!write_baseline.empty()) {
    std::ofstream(write_baseline) << nlohmann::json(reporter.rates).dump(2) << '\n';
    std::printf("baseline written to %s\n", write_baseline.c_str());
  }
  if (baseline.empty()) return 0;

  std::ifstream in(baseline);
  if (!in) {
    std::fprintf(stderr, "cannot read baseline %s\n", baseline.c_str());
    return 2;
  }
  const auto base = nlohmann::json::parse(in).get<std::map<std::string, double>>();
  const double tol = std::stod(tolerance);
  int regressions = 0;
  for (const auto& [name, rate] : reporter.rates) {
    auto it = base.find(name);
    if (it == base.end()) continue;
    const double ratio = rate / it->second;
    const bool slow = ratio < 1.0 - tol;
    regressions += slow;
    std::printf("%-28s %12.0f items/s  baseline %12.0f  x%.2f%s\n", name.c_str(), rate, it->second, ratio,
                slow ? "  REGRESSION" : "");
  }
  return regressions ? 1 : 0;
}
