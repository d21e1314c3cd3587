#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tweetforge/eval/metrics.hpp"
#include "tweetforge/eval/protocol.hpp"

namespace tweetforge::eval {

// Flat key=value text: task, n_items, run_seed, one line per metric, warnings.
void write_report_text(std::ostream& out, const MetricReport& r);
// One JSON object per report.
std::string report_to_json(const MetricReport& r);
// Accepts either representation.
MetricReport parse_report(const std::string& content, const std::string& source = "<report>");
MetricReport read_report(const std::filesystem::path& path);

void write_aggregate_text(std::ostream& out, const RunAggregate& a);
std::string aggregate_to_json(const RunAggregate& a);

// Classification data: `id<TAB>label<TAB>text` per line.
struct LabeledDoc {
  std::string id;
  std::string text;
  std::string gold_label;
  friend bool operator==(const LabeledDoc&, const LabeledDoc&) = default;
};
std::vector<LabeledDoc> parse_labeled_docs(std::istream& in, const std::string& source = "<input>");
std::vector<LabeledDoc> load_labeled_docs(const std::filesystem::path& path);
void write_labeled_docs(std::ostream& out, const std::vector<LabeledDoc>& docs);

// One label per non-blank line.
std::vector<std::string> load_labels(const std::filesystem::path& path);

}  // namespace tweetforge::eval
