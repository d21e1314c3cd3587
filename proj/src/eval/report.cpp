#include "tweetforge/eval/report.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include <nlohmann/json.hpp>

#include "tweetforge/common.hpp"

namespace tweetforge::eval {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

double parse_number(std::string_view v, const std::string& where) {
  double d = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), d);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw FormatError(where + ": not a number");
  return d;
}

}  // namespace

void write_report_text(std::ostream& out, const MetricReport& r) {
  out << "task=" << r.task << '\n' << "n_items=" << r.n_items << '\n' << "run_seed=" << r.run_seed << '\n';
  for (const auto& [k, v] : r.metrics) out << "metric." << k << '=' << format_double(v) << '\n';
  for (const auto& w : r.warnings) out << "warning=" << w << '\n';
}

std::string report_to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["task"] = r.task;
  j["n_items"] = r.n_items;
  j["run_seed"] = r.run_seed;
  j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  j["warnings"] = r.warnings;
  return j.dump();
}

MetricReport parse_report(const std::string& content, const std::string& source) {
  MetricReport r;
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    auto j = nlohmann::json::parse(content, nullptr, false);
    if (j.is_discarded()) throw FormatError(source + ": invalid JSON report");
    try {
      r.task = j.at("task").get<std::string>();
      r.n_items = j.at("n_items").get<std::uint64_t>();
      r.run_seed = j.value("run_seed", std::int64_t{0});
      for (const auto& [k, v] : j.at("metrics").items()) r.metrics[k] = v.get<double>();
      if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(source + ": " + e.what());
    }
    return r;
  }
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool has_task = false;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) nl = content.size();
    std::string_view line(content.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw FormatError(where + ": expected key=value");
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "task") {
      r.task = value;
      has_task = true;
    } else if (key == "n_items") {
      r.n_items = static_cast<std::uint64_t>(parse_number(value, where));
    } else if (key == "run_seed") {
      r.run_seed = static_cast<std::int64_t>(parse_number(value, where));
    } else if (key.starts_with("metric.")) {
      r.metrics[std::string(key.substr(7))] = parse_number(value, where);
    } else if (key == "warning") {
      r.warnings.emplace_back(value);
    } else {
      throw FormatError(where + ": unknown key '" + std::string(key) + "'");
    }
  }
  if (!has_task) throw FormatError(source + ": report has no task");
  return r;
}

MetricReport read_report(const std::filesystem::path& path) {
  return parse_report(slurp(path), path.string());
}

void write_aggregate_text(std::ostream& out, const RunAggregate& a) {
  out << "task=" << a.task << '\n' << "runs=" << a.runs << '\n';
  for (const auto& [k, s] : a.metrics) {
    out << "metric." << k << ".mean=" << format_double(s.mean) << '\n'
        << "metric." << k << ".std=" << format_double(s.std) << '\n'
        << "metric." << k << ".min=" << format_double(s.min) << '\n'
        << "metric." << k << ".max=" << format_double(s.max) << '\n';
  }
}

std::string aggregate_to_json(const RunAggregate& a) {
  nlohmann::ordered_json j;
  j["task"] = a.task;
  j["runs"] = a.runs;
  j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, s] : a.metrics)
    j["metrics"][k] = {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
  return j.dump();
}

std::vector<LabeledDoc> parse_labeled_docs(std::istream& in, const std::string& source) {
  std::vector<LabeledDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || t1 == 0 || t2 == t1 + 1)
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected id<TAB>label<TAB>text");
    docs.push_back(LabeledDoc{line.substr(0, t1), line.substr(t2 + 1), line.substr(t1 + 1, t2 - t1 - 1)});
  }
  return docs;
}

std::vector<LabeledDoc> load_labeled_docs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_labeled_docs(in, path.string());
}

void write_labeled_docs(std::ostream& out, const std::vector<LabeledDoc>& docs) {
  for (const auto& d : docs) out << d.id << '\t' << d.gold_label << '\t' << d.text << '\n';
}

std::vector<std::string> load_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view v = line;
    while (!v.empty() && is_ascii_space(v.back())) v.remove_suffix(1);
    while (!v.empty() && is_ascii_space(v.front())) v.remove_prefix(1);
    if (!v.empty()) labels.emplace_back(v);
  }
  return labels;
}

}  // namespace tweetforge::eval
