#include "tweetforge/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "tweetforge/utf8.hpp"

namespace tweetforge {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Tie-break key: the end-of-word sentinel orders after every character, so
// (a, a) beats (a, </w>). 0xFF never occurs in valid UTF-8.
std::string order_key(std::string_view symbol) {
  if (!ends_with(symbol, kEndOfWord)) return std::string(symbol);
  std::string key(symbol.substr(0, symbol.size() - kEndOfWord.size()));
  key.push_back('\xFF');
  return key;
}

}  // namespace

// ---------------------------------------------------------------------------
// MergeTable

MergeTable::MergeTable() : MergeTable({}, {kSpecialPieces, kSpecialPieces + 5}) {}

MergeTable::MergeTable(std::vector<MergeRule> merges, std::vector<std::string> vocab)
    : merges_(std::move(merges)), vocab_(std::move(vocab)) {
  if (vocab_.size() < specials_.count) throw FormatError("vocabulary is missing special pieces");
  for (std::uint32_t i = 0; i < specials_.count; ++i) {
    if (vocab_[i] != kSpecialPieces[i]) {
      throw FormatError("vocabulary id " + std::to_string(i) + " must be special piece " +
                        std::string(kSpecialPieces[i]));
    }
  }
  piece_ids_.reserve(vocab_.size());
  for (std::uint32_t id = 0; id < vocab_.size(); ++id) {
    if (vocab_[id].empty()) throw FormatError("empty vocabulary piece at id " + std::to_string(id));
    if (!piece_ids_.emplace(vocab_[id], id).second)
      throw FormatError("duplicate vocabulary piece '" + vocab_[id] + "'");
  }

  auto intern = [this](const std::string& s) {
    auto [it, inserted] = symbol_ids_.emplace(s, static_cast<std::uint32_t>(symbol_ids_.size()));
    return it->second;
  };
  for (std::uint32_t rank = 0; rank < merges_.size(); ++rank) {
    const auto& m = merges_[rank];
    const std::uint32_t l = intern(m.left);
    const std::uint32_t r = intern(m.right);
    const std::uint32_t res = intern(m.left + m.right);
    pairs_.emplace(pair_key(l, r), PairInfo{rank, res});
  }
  if (auto it = symbol_ids_.find(kEndOfWord); it != symbol_ids_.end()) eow_symbol_ = it->second;
}

std::uint32_t MergeTable::piece_id(std::string_view piece) const {
  auto it = piece_ids_.find(piece);
  return it == piece_ids_.end() ? specials_.unk : it->second;
}

std::uint32_t MergeTable::symbol_id(std::string_view symbol) const {
  auto it = symbol_ids_.find(symbol);
  return it == symbol_ids_.end() ? kNoSymbol : it->second;
}

const MergeTable::PairInfo* MergeTable::find_pair(std::uint32_t left, std::uint32_t right) const {
  if (left == kNoSymbol || right == kNoSymbol) return nullptr;
  auto it = pairs_.find(pair_key(left, right));
  return it == pairs_.end() ? nullptr : &it->second;
}

std::vector<std::string> pieces_for_symbol(std::string_view symbol) {
  if (ends_with(symbol, kEndOfWord)) {
    const auto stripped = symbol.substr(0, symbol.size() - kEndOfWord.size());
    if (stripped.empty()) return {};
    return {std::string(stripped)};
  }
  return {std::string(symbol), std::string(symbol) + std::string(kContinuationMarker)};
}

bool is_atomic_token(std::string_view token) {
  if (token == kUserToken || token == kUrlToken) return true;
  if (token.size() >= 3 && token.front() == ':' && token.back() == ':') {
    const auto inner = token.substr(1, token.size() - 2);
    if (inner.find(':') == std::string_view::npos &&
        std::none_of(inner.begin(), inner.end(), [](char c) { return is_ascii_space(c); })) {
      return true;
    }
  }
  const auto b0 = static_cast<unsigned char>(token.empty() ? 0 : token[0]);
  if (b0 < 0x80 && b0 != '#' && b0 != '*' && !(b0 >= '0' && b0 <= '9')) return false;
  return !token.empty() && classify_token(token) == TokenClass::emoji;
}

// ---------------------------------------------------------------------------
// Encoding

std::string SubwordSequence::joined() const {
  std::string out;
  for (const auto& p : pieces) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

void encode_word(std::string_view word, const MergeTable& table, SubwordSequence& out) {
  if (word.empty()) return;
  out.word_boundaries.push_back(out.pieces.size());
  auto emit = [&](std::string piece) {
    const std::uint32_t id = table.piece_id(piece);
    if (id == table.specials().unk && piece != kSpecialPieces[1]) ++out.unk_count;
    out.ids.push_back(id);
    out.pieces.push_back(std::move(piece));
  };
  if (is_atomic_token(word)) {
    emit(std::string(word));
    return;
  }

  struct Sym {
    std::uint32_t id;
    std::uint32_t begin;
    std::uint32_t end;
  };
  std::vector<Sym> syms;
  syms.reserve(word.size() + 1);
  for (std::size_t i = 0; i < word.size();) {
    const std::size_t len = utf8::decode(word, i).len;
    syms.push_back(Sym{table.symbol_id(word.substr(i, len)), static_cast<std::uint32_t>(i),
                       static_cast<std::uint32_t>(i + len)});
    i += len;
  }
  const auto n = static_cast<std::uint32_t>(word.size());
  syms.push_back(Sym{table.end_of_word_symbol(), n, n});

  std::int64_t last_rank = -1;
  for (;;) {
    const MergeTable::PairInfo* best = nullptr;
    std::uint32_t best_left = 0, best_right = 0;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      const auto* info = table.find_pair(syms[i].id, syms[i + 1].id);
      if (info && static_cast<std::int64_t>(info->rank) > last_rank &&
          (!best || info->rank < best->rank)) {
        best = info;
        best_left = syms[i].id;
        best_right = syms[i + 1].id;
      }
    }
    if (!best) break;
    std::size_t w = 0;
    for (std::size_t r = 0; r < syms.size(); ++r) {
      if (r + 1 < syms.size() && syms[r].id == best_left && syms[r + 1].id == best_right) {
        syms[w++] = Sym{best->result, syms[r].begin, syms[r + 1].end};
        ++r;
      } else {
        syms[w++] = syms[r];
      }
    }
    syms.resize(w);
    last_rank = best->rank;
  }

  // A bare sentinel only marks its predecessor as word-final.
  const Sym& tail = syms.back();
  std::size_t count = syms.size();
  if (tail.begin == n && tail.end == n) --count;
  for (std::size_t i = 0; i < count; ++i) {
    std::string piece(word.substr(syms[i].begin, syms[i].end - syms[i].begin));
    if (i + 1 < count) piece += kContinuationMarker;
    emit(std::move(piece));
  }
}

SubwordSequence apply_bpe(std::span<const std::string> words, const MergeTable& table) {
  SubwordSequence out;
  for (const auto& w : words) encode_word(w, table, out);
  return out;
}

SubwordSequence apply_bpe(const TokenSequence& tokens, const MergeTable& table) {
  SubwordSequence out;
  for (const auto& t : tokens.tokens) encode_word(t.text, table, out);
  return out;
}

void BpeEncoder::encode_word(std::string_view word, SubwordSequence& out) {
  if (word.empty()) return;
  auto it = cache_.find(word);
  if (it == cache_.end()) {
    if (cache_.size() >= max_cache_) cache_.clear();
    scratch_ = SubwordSequence{};
    tweetforge::encode_word(word, *table_, scratch_);
    it = cache_.emplace(std::string(word),
                        Cached{std::move(scratch_.ids), std::move(scratch_.pieces), scratch_.unk_count})
             .first;
  }
  out.word_boundaries.push_back(out.pieces.size());
  out.ids.insert(out.ids.end(), it->second.ids.begin(), it->second.ids.end());
  out.pieces.insert(out.pieces.end(), it->second.pieces.begin(), it->second.pieces.end());
  out.unk_count += it->second.unk;
}

SubwordSequence BpeEncoder::encode(const TokenSequence& tokens) {
  SubwordSequence out;
  for (const auto& t : tokens.tokens) encode_word(t.text, out);
  return out;
}

SubwordSequence BpeEncoder::encode(std::span<const std::string> words) {
  SubwordSequence out;
  for (const auto& w : words) encode_word(w, out);
  return out;
}

std::vector<std::string> decode_bpe(const SubwordSequence& seq) {
  std::vector<std::string> words;
  if (seq.pieces.empty()) return words;
  if (seq.word_boundaries.empty()) {
    std::string cur;
    for (const auto& p : seq.pieces) {
      if (ends_with(p, kContinuationMarker)) {
        cur.append(p, 0, p.size() - kContinuationMarker.size());
      } else {
        words.push_back(cur + p);
        cur.clear();
      }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
  }
  for (std::size_t w = 0; w < seq.word_boundaries.size(); ++w) {
    const std::size_t begin = seq.word_boundaries[w];
    const std::size_t end =
        w + 1 < seq.word_boundaries.size() ? seq.word_boundaries[w + 1] : seq.pieces.size();
    std::string word;
    for (std::size_t i = begin; i < end; ++i) {
      std::string_view p = seq.pieces[i];
      if (i + 1 < end && ends_with(p, kContinuationMarker))
        p.remove_suffix(kContinuationMarker.size());
      word += p;
    }
    words.push_back(std::move(word));
  }
  return words;
}

// ---------------------------------------------------------------------------
// Counting kernels

WordCounts count_words_serial(std::span<const std::string> lines) {
  WordCounts counts;
  for (const auto& line : lines) {
    for_each_field(line, [&](std::string_view w) {
      auto it = counts.find(w);
      if (it == counts.end()) {
        counts.emplace(std::string(w), 1);
      } else {
        ++it->second;
      }
    });
  }
  return counts;
}

WordCounts count_words(std::span<const std::string> lines, int workers) {
  if (workers <= 1) return count_words_serial(lines);
  const auto n = static_cast<std::ptrdiff_t>(lines.size());
  std::vector<WordCounts> partial(static_cast<std::size_t>(workers));
#pragma omp parallel num_threads(workers)
  {
    auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for_each_field(lines[static_cast<std::size_t>(i)], [&](std::string_view w) {
        auto it = local.find(w);
        if (it == local.end()) {
          local.emplace(std::string(w), 1);
        } else {
          ++it->second;
        }
      });
    }
  }
  WordCounts total = std::move(partial[0]);
  for (std::size_t t = 1; t < partial.size(); ++t)
    for (auto& [w, c] : partial[t]) total[w] += c;
  return total;
}

PairCounts count_pairs_serial(std::span<const SymbolWord> words) {
  PairCounts counts;
  for (const auto& w : words) {
    for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i)
      counts[pair_key(w.symbols[i], w.symbols[i + 1])] += static_cast<std::int64_t>(w.count);
  }
  return counts;
}

PairCounts count_pairs(std::span<const SymbolWord> words, int workers) {
  if (workers <= 1) return count_pairs_serial(words);
  const auto n = static_cast<std::ptrdiff_t>(words.size());
  std::vector<PairCounts> partial(static_cast<std::size_t>(workers));
#pragma omp parallel num_threads(workers)
  {
    auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const auto& w = words[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i)
        local[pair_key(w.symbols[i], w.symbols[i + 1])] += static_cast<std::int64_t>(w.count);
    }
  }
  PairCounts total = std::move(partial[0]);
  for (std::size_t t = 1; t < partial.size(); ++t)
    for (auto [k, c] : partial[t]) total[k] += c;
  return total;
}

// ---------------------------------------------------------------------------
// Learning

MergeTable learn_bpe(const WordCounts& words, const BpeLearnConfig& cfg, BpeLearnStats* stats) {
  if (words.empty()) throw std::invalid_argument("learn_bpe: empty token stream");

  std::vector<std::pair<std::string_view, std::uint64_t>> sorted;
  sorted.reserve(words.size());
  for (const auto& [w, c] : words)
    if (c > 0 && !w.empty()) sorted.emplace_back(w, c);
  if (sorted.empty()) throw std::invalid_argument("learn_bpe: empty token stream");
  std::sort(sorted.begin(), sorted.end());

  BpeLearnStats local_stats;
  std::set<std::string> alphabet;
  std::set<std::string> atomics;
  std::vector<std::pair<std::string_view, std::uint64_t>> regular;
  for (const auto& [w, c] : sorted) {
    if (w.find(kEndOfWord) != std::string_view::npos) {
      ++local_stats.skipped_words;
    } else if (is_atomic_token(w)) {
      atomics.emplace(w);
    } else {
      regular.emplace_back(w, c);
      for (auto cp : utf8::split_codepoints(w)) alphabet.emplace(cp);
    }
  }

  std::vector<std::string> vocab(kSpecialPieces, kSpecialPieces + 5);
  StringSet in_vocab(vocab.begin(), vocab.end());
  auto add_pieces = [&](const std::vector<std::string>& pieces) {
    for (const auto& p : pieces)
      if (in_vocab.insert(p).second) vocab.push_back(p);
  };
  for (const auto& c : alphabet) add_pieces(pieces_for_symbol(c));
  for (const auto& a : atomics) add_pieces({a});
  local_stats.base_pieces = vocab.size();
  if (cfg.target_vocab <= vocab.size()) {
    throw std::invalid_argument("learn_bpe: target vocabulary " + std::to_string(cfg.target_vocab) +
                                " does not exceed the " + std::to_string(vocab.size()) +
                                " base symbols");
  }

  std::vector<std::string> sym_text;
  std::vector<std::string> sym_key;
  StringMap<std::uint32_t> sym_ids;
  auto intern = [&](std::string_view s) {
    auto it = sym_ids.find(s);
    if (it != sym_ids.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(sym_text.size());
    sym_text.emplace_back(s);
    sym_key.push_back(order_key(s));
    sym_ids.emplace(std::string(s), id);
    return id;
  };
  const std::uint32_t eow = intern(kEndOfWord);

  std::vector<SymbolWord> sw;
  sw.reserve(regular.size());
  for (const auto& [w, c] : regular) {
    SymbolWord word;
    word.count = c;
    for (auto cp : utf8::split_codepoints(w)) word.symbols.push_back(intern(cp));
    word.symbols.push_back(eow);
    sw.push_back(std::move(word));
  }

  PairCounts counts = count_pairs(sw, cfg.workers);
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where;
  for (std::uint32_t wi = 0; wi < sw.size(); ++wi) {
    const auto& s = sw[wi].symbols;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) where[pair_key(s[i], s[i + 1])].push_back(wi);
  }

  struct Entry {
    std::int64_t count;
    std::uint32_t left;
    std::uint32_t right;
  };
  // Max-heap: higher count first, then lexicographically smaller (left, right).
  auto lower_priority = [&sym_key](const Entry& x, const Entry& y) {
    if (x.count != y.count) return x.count < y.count;
    const int cl = sym_key[x.left].compare(sym_key[y.left]);
    if (cl != 0) return cl > 0;
    return sym_key[x.right].compare(sym_key[y.right]) > 0;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(lower_priority);
  for (auto [key, c] : counts)
    if (c > 0) heap.push(Entry{c, static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key)});

  std::vector<MergeRule> merges;
  std::unordered_map<std::uint64_t, std::int64_t> delta;
  std::vector<std::uint32_t> touched;
  for (;;) {
    std::optional<Entry> best;
    while (!heap.empty()) {
      Entry e = heap.top();
      heap.pop();
      auto it = counts.find(pair_key(e.left, e.right));
      if (it != counts.end() && it->second == e.count && e.count > 0) {
        best = e;
        break;
      }
    }
    if (!best) break;
    local_stats.final_max_pair_freq = static_cast<std::uint64_t>(best->count);
    if (static_cast<std::uint64_t>(best->count) < cfg.min_pair_freq) break;

    const std::string merged = sym_text[best->left] + sym_text[best->right];
    std::vector<std::string> fresh;
    for (auto& p : pieces_for_symbol(merged))
      if (!in_vocab.contains(p)) fresh.push_back(std::move(p));
    if (vocab.size() + fresh.size() > cfg.target_vocab) break;

    merges.push_back(MergeRule{sym_text[best->left], sym_text[best->right]});
    add_pieces(fresh);
    const std::uint32_t a = best->left, b = best->right;
    const std::uint32_t c = intern(merged);
    const std::uint64_t key = pair_key(a, b);

    touched = std::move(where[key]);
    where.erase(key);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    delta.clear();
    for (std::uint32_t wi : touched) {
      auto& s = sw[wi].symbols;
      bool present = false;
      for (std::size_t i = 0; i + 1 < s.size() && !present; ++i) present = s[i] == a && s[i + 1] == b;
      if (!present) continue;
      const auto wc = static_cast<std::int64_t>(sw[wi].count);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) delta[pair_key(s[i], s[i + 1])] -= wc;
      std::size_t w = 0;
      for (std::size_t r = 0; r < s.size(); ++r) {
        if (r + 1 < s.size() && s[r] == a && s[r + 1] == b) {
          s[w++] = c;
          ++r;
        } else {
          s[w++] = s[r];
        }
      }
      s.resize(w);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const auto k = pair_key(s[i], s[i + 1]);
        delta[k] += wc;
        if (s[i] == c || s[i + 1] == c) where[k].push_back(wi);
      }
    }
    for (auto [k, d] : delta) {
      if (d == 0) continue;
      auto& cur = counts[k];
      cur += d;
      if (cur > 0) {
        heap.push(Entry{cur, static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k)});
      } else {
        counts.erase(k);
      }
    }
  }

  if (stats) *stats = local_stats;
  return MergeTable(std::move(merges), std::move(vocab));
}

// ---------------------------------------------------------------------------
// Persistence

std::filesystem::path vocab_path_for(const std::filesystem::path& merges_path) {
  auto p = merges_path;
  p += ".vocab";
  return p;
}

void save_merges(const MergeTable& table, const std::filesystem::path& merges_path,
                 const std::filesystem::path& vocab_path) {
  const auto vpath = vocab_path.empty() ? vocab_path_for(merges_path) : vocab_path;
  std::ofstream m(merges_path, std::ios::binary);
  if (!m) throw IoError("cannot write merges file " + merges_path.string());
  m << kMergesHeader << '\n';
  for (const auto& r : table.merges()) m << r.left << ' ' << r.right << '\n';
  std::ofstream v(vpath, std::ios::binary);
  if (!v) throw IoError("cannot write vocabulary file " + vpath.string());
  for (std::size_t id = 0; id < table.vocab().size(); ++id) v << table.vocab()[id] << ' ' << id << '\n';
  if (!m || !v) throw IoError("write failed for " + merges_path.string());
}

MergeTable load_merges(const std::filesystem::path& merges_path,
                       const std::filesystem::path& vocab_path) {
  const auto vpath = vocab_path.empty() ? vocab_path_for(merges_path) : vocab_path;
  std::ifstream m(merges_path, std::ios::binary);
  if (!m) throw IoError("cannot open merges file " + merges_path.string());
  std::string line;
  if (!std::getline(m, line) || line != kMergesHeader) {
    throw FormatError(merges_path.string() + ": unsupported merges file header '" + line +
                      "' (expected '" + std::string(kMergesHeader) + "')");
  }
  std::vector<MergeRule> merges;
  std::size_t lineno = 1;
  while (std::getline(m, line)) {
    ++lineno;
    const auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 >= line.size() ||
        line.find(' ', sp + 1) != std::string::npos) {
      throw FormatError(merges_path.string() + ":" + std::to_string(lineno) + ": malformed merge");
    }
    merges.push_back(MergeRule{line.substr(0, sp), line.substr(sp + 1)});
  }

  std::ifstream v(vpath, std::ios::binary);
  if (!v) throw IoError("cannot open vocabulary file " + vpath.string());
  std::vector<std::string> vocab;
  lineno = 0;
  while (std::getline(v, line)) {
    ++lineno;
    const auto sp = line.rfind(' ');
    if (sp == std::string::npos || sp == 0 ||
        line.substr(sp + 1) != std::to_string(vocab.size())) {
      throw FormatError(vpath.string() + ":" + std::to_string(lineno) +
                        ": expected '<piece> " + std::to_string(vocab.size()) + "'");
    }
    vocab.push_back(line.substr(0, sp));
  }
  return MergeTable(std::move(merges), std::move(vocab));
}

}  // namespace tweetforge
