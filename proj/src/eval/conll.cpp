#include "tweetforge/eval/conll.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "tweetforge/common.hpp"

namespace tweetforge::eval {

namespace {

std::string_view entity_type(std::string_view tag) { return tag.size() > 2 ? tag.substr(2) : std::string_view{}; }

}  // namespace

std::size_t repair_bio(std::vector<std::string>& tags) {
  std::size_t repairs = 0;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    auto& t = tags[i];
    if (t.rfind("I-", 0) != 0) continue;
    const bool continues = i > 0 && (tags[i - 1].rfind("B-", 0) == 0 || tags[i - 1].rfind("I-", 0) == 0) &&
                           entity_type(tags[i - 1]) == entity_type(t);
    if (!continues) {
      t[0] = 'B';
      ++repairs;
    }
  }
  return repairs;
}

ConllData parse_conll(std::istream& in, const ColumnSpec& spec, const std::string& source) {
  ConllData data;
  TaggedSequence cur;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  std::string line;
  std::vector<std::string_view> fields;
  auto flush = [&] {
    if (cur.tokens.empty()) return;
    if (spec.bio) data.bio_repairs += repair_bio(cur.tags);
    data.sentences.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++line_no;
    fields.clear();
    for_each_field(line, [&](std::string_view f) { fields.push_back(f); });
    if (fields.empty()) {
      flush();
      continue;
    }
    if (columns == 0) {
      columns = fields.size();
      if (spec.token_column >= columns || spec.tag_column >= columns) {
        throw FormatError(source + ":" + std::to_string(line_no) + ": expected at least " +
                          std::to_string(std::max(spec.token_column, spec.tag_column) + 1) +
                          " columns, found " + std::to_string(columns));
      }
    } else if (fields.size() != columns) {
      throw FormatError(source + ":" + std::to_string(line_no) + ": ragged line with " +
                        std::to_string(fields.size()) + " columns (expected " +
                        std::to_string(columns) + ")");
    }
    cur.tokens.emplace_back(fields[spec.token_column]);
    cur.tags.emplace_back(fields[spec.tag_column]);
  }
  if (in.bad()) throw IoError(source + ": read error");
  flush();
  return data;
}

ConllData load_conll(const std::filesystem::path& path, const ColumnSpec& spec) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_conll(in, spec, path.string());
}

void write_conll(std::ostream& out, const std::vector<TaggedSequence>& sentences) {
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (s > 0) out << '\n';
    for (std::size_t i = 0; i < sentences[s].size(); ++i)
      out << sentences[s].tokens[i] << '\t' << sentences[s].tags[i] << '\n';
  }
}

}  // namespace tweetforge::eval
