#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tweetforge::eval {

struct TaggedSequence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  std::size_t size() const noexcept { return tokens.size(); }
  friend bool operator==(const TaggedSequence&, const TaggedSequence&) = default;
};

struct ColumnSpec {
  std::size_t token_column = 0;
  std::size_t tag_column = 1;
  bool bio = false;  // validate and repair BIO tags
};

struct ConllData {
  std::vector<TaggedSequence> sentences;
  std::size_t bio_repairs = 0;
};

/// Blank-line separated sentences, whitespace separated columns. Every
/// non-blank line must have the same column count as the first one.
ConllData parse_conll(std::istream& in, const ColumnSpec& spec, const std::string& source = "<input>");
ConllData load_conll(const std::filesystem::path& path, const ColumnSpec& spec);

void write_conll(std::ostream& out, const std::vector<TaggedSequence>& sentences);

// I- after O, at sentence start, or after another type becomes B-. Returns repairs.
std::size_t repair_bio(std::vector<std::string>& tags);

}  // namespace tweetforge::eval
