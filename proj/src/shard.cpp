#include "tweetforge/shard.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>
#include <zlib.h>

namespace tweetforge {

namespace {

constexpr char kMagic[8] = {'T', 'F', 'S', 'H', 'A', 'R', 'D', '\0'};

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void bytes(std::string_view s) { buf_.append(s); }
  void ids(std::span<const std::uint32_t> v) {
    for (auto x : v) u32(x);
  }
  std::string& data() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view data, const std::string& shard) : data_(data), shard_(shard) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    return lo | (static_cast<std::uint64_t>(u32()) << 32);
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void ids(std::vector<std::uint32_t>& out, std::size_t n) {
    need(n * 4);
    out.resize(n);
    for (auto& x : out) x = u32();
  }
  bool at_end() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ShardError(shard_, "truncated record data");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
  const std::string& shard_;
};

std::uint32_t crc_of(std::string_view data) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

void put_header(Writer& w, ShardKind kind, std::uint32_t block_length, std::uint64_t records) {
  w.bytes(std::string_view(kMagic, sizeof kMagic));
  w.u32(kShardVersion);
  w.u32(static_cast<std::uint32_t>(kind));
  w.u32(block_length);
  w.u64(records);
}

void put_record(Writer& w, const SequenceBlock& b) {
  w.u64(b.index);
  w.u32(b.pad_count);
  w.u32(static_cast<std::uint32_t>(b.segments.size()));
  for (const auto& s : b.segments) {
    w.u32(static_cast<std::uint32_t>(s.tweet_id.size()));
    w.bytes(s.tweet_id);
    w.u32(s.start);
    w.u32(s.end);
  }
  w.ids(b.ids);
}

void put_record(Writer& w, const MaskedExample& ex) {
  w.u64(ex.block_index);
  w.u32(ex.epoch);
  w.ids(ex.input_ids);
  w.u32(static_cast<std::uint32_t>(ex.label_positions.size()));
  w.ids(ex.label_positions);
  w.ids(ex.labels);
  for (auto a : ex.actions) w.u8(static_cast<std::uint8_t>(a));
}

void get_record(Reader& r, std::uint32_t block_length, SequenceBlock& b) {
  b.index = r.u64();
  b.pad_count = r.u32();
  const std::uint32_t nseg = r.u32();
  if (nseg > block_length) throw std::length_error("segment count");
  b.segments.resize(nseg);
  for (auto& s : b.segments) {
    const std::uint32_t len = r.u32();
    s.tweet_id = r.bytes(len);
    s.start = r.u32();
    s.end = r.u32();
  }
  r.ids(b.ids, block_length);
}

void get_record(Reader& r, std::uint32_t block_length, MaskedExample& ex) {
  ex.block_index = r.u64();
  ex.epoch = r.u32();
  r.ids(ex.input_ids, block_length);
  const std::uint32_t k = r.u32();
  if (k > block_length) throw std::length_error("label count");
  r.ids(ex.label_positions, k);
  r.ids(ex.labels, k);
  ex.actions.resize(k);
  for (auto& a : ex.actions) {
    const auto v = r.u8();
    if (v > 2) throw std::length_error("mask action");
    a = static_cast<MaskAction>(v);
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed for " + p.string());
}

nlohmann::ordered_json specials_json(const SpecialIds& s) {
  return {{"pad", s.pad}, {"unk", s.unk}, {"bos", s.bos}, {"eos", s.eos}, {"mask", s.mask}};
}

template <class Record>
ShardManifest write_all(const std::filesystem::path& dir, std::span<const Record> records,
                        std::uint64_t shard_size, ShardManifest m) {
  if (shard_size == 0) throw ConfigError("shard_size must be positive");
  std::filesystem::create_directories(dir);
  m.shard_size = shard_size;
  m.record_count = records.size();
  for (std::size_t begin = 0; begin < records.size(); begin += shard_size) {
    const std::size_t end = std::min<std::size_t>(records.size(), begin + shard_size);
    Writer w;
    put_header(w, m.kind, m.block_length, end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      if (records[i].ids_size() != m.block_length)
        throw FormatError("record length differs from block_length");
      put_record(w, records[i].get());
    }
    const std::uint32_t crc = crc_of(w.data());
    w.u32(crc);
    ShardInfo info{shard_name(m.shards.size() + 1), end - begin, crc};
    write_file(dir / info.name, w.data());
    m.shards.push_back(std::move(info));
  }

  nlohmann::ordered_json j;
  j["format"] = "tweetforge-shards";
  j["version"] = kShardVersion;
  j["kind"] = m.kind == ShardKind::blocks ? "blocks" : "masked";
  j["block_length"] = m.block_length;
  j["shard_size"] = m.shard_size;
  j["record_count"] = m.record_count;
  j["sequence_layout"] = "each tweet bracketed as bos ... eos; trailing pad";
  j["specials"] = specials_json(m.specials);
  if (m.mask_policy) {
    const auto& p = *m.mask_policy;
    j["mask_policy"] = {{"mask_fraction", p.mask_fraction}, {"mask_prob", p.mask_prob},
                        {"random_prob", p.random_prob},     {"keep_prob", p.keep_prob},
                        {"seed", p.seed}};
  }
  if (m.epoch) j["epoch"] = *m.epoch;
  auto& shards = j["shards"] = nlohmann::ordered_json::array();
  for (const auto& s : m.shards)
    shards.push_back({{"name", s.name}, {"records", s.records}, {"crc32", s.crc32}});
  write_file(dir / kManifestName, j.dump(2) + "\n");
  return m;
}

// Adapters so write_all can treat both record types alike.
struct BlockRef {
  const SequenceBlock* b;
  std::size_t ids_size() const { return b->ids.size(); }
  const SequenceBlock& get() const { return *b; }
};
struct ExampleRef {
  const MaskedExample* e;
  std::size_t ids_size() const { return e->input_ids.size(); }
  const MaskedExample& get() const { return *e; }
};

template <class Record>
std::vector<Record> read_shard(const std::filesystem::path& file, ShardKind kind) {
  const std::string name = file.filename().string();
  std::string data;
  try {
    data = read_file(file);
  } catch (const IoError& e) {
    throw ShardError(name, e.what());
  }
  if (data.size() < sizeof kMagic + 24 + 4) throw ShardError(name, "file too short");
  const std::string_view body(data.data(), data.size() - 4);
  Reader trailer(std::string_view(data).substr(body.size()), name);
  if (trailer.u32() != crc_of(body)) throw ShardError(name, "checksum mismatch");
  if (std::memcmp(data.data(), kMagic, sizeof kMagic) != 0) throw ShardError(name, "bad magic");
  Reader r(body.substr(sizeof kMagic), name);
  const std::uint32_t version = r.u32();
  if (version != kShardVersion)
    throw ShardError(name, "unsupported shard version " + std::to_string(version));
  if (r.u32() != static_cast<std::uint32_t>(kind)) throw ShardError(name, "unexpected shard kind");
  const std::uint32_t block_length = r.u32();
  const std::uint64_t count = r.u64();
  std::vector<Record> out;
  try {
    out.resize(static_cast<std::size_t>(std::min<std::uint64_t>(count, body.size())));
    if (out.size() != count) throw std::length_error("record count");
    for (auto& rec : out) get_record(r, block_length, rec);
  } catch (const std::length_error& e) {
    throw ShardError(name, std::string("corrupt ") + e.what());
  }
  if (!r.at_end()) throw ShardError(name, "trailing bytes after records");
  return out;
}

template <class Record>
std::vector<Record> read_all(const std::filesystem::path& dir, ShardKind kind) {
  const ShardManifest m = read_manifest(dir);
  if (m.kind != kind) throw FormatError(dir.string() + ": manifest lists a different shard kind");
  std::vector<Record> out;
  for (const auto& s : m.shards) {
    auto part = read_shard<Record>(dir / s.name, kind);
    if (part.size() != s.records) throw ShardError(s.name, "record count differs from manifest");
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace

std::string shard_name(std::size_t one_based) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "shard-%05zu.bin", one_based);
  return buf;
}

ShardManifest write_shards(const std::filesystem::path& dir, std::span<const SequenceBlock> blocks,
                           std::uint64_t shard_size, std::uint32_t block_length,
                           const SpecialIds& specials) {
  std::vector<BlockRef> refs;
  refs.reserve(blocks.size());
  for (const auto& b : blocks) refs.push_back(BlockRef{&b});
  ShardManifest m;
  m.kind = ShardKind::blocks;
  m.block_length = block_length;
  m.specials = specials;
  return write_all<BlockRef>(dir, refs, shard_size, std::move(m));
}

ShardManifest write_shards(const std::filesystem::path& dir, std::span<const MaskedExample> examples,
                           std::uint64_t shard_size, std::uint32_t block_length,
                           const MaskPolicy& policy, std::uint32_t epoch,
                           const SpecialIds& specials) {
  std::vector<ExampleRef> refs;
  refs.reserve(examples.size());
  for (const auto& e : examples) refs.push_back(ExampleRef{&e});
  ShardManifest m;
  m.kind = ShardKind::masked;
  m.block_length = block_length;
  m.specials = specials;
  m.mask_policy = policy;
  m.epoch = epoch;
  return write_all<ExampleRef>(dir, refs, shard_size, std::move(m));
}

ShardManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestName;
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw FormatError(path.string() + ": invalid JSON");
  try {
    if (j.at("version").get<std::uint32_t>() != kShardVersion)
      throw FormatError(path.string() + ": unsupported manifest version");
    ShardManifest m;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "blocks") {
      m.kind = ShardKind::blocks;
    } else if (kind == "masked") {
      m.kind = ShardKind::masked;
    } else {
      throw FormatError(path.string() + ": unknown shard kind '" + kind + "'");
    }
    m.block_length = j.at("block_length").get<std::uint32_t>();
    m.shard_size = j.at("shard_size").get<std::uint64_t>();
    m.record_count = j.at("record_count").get<std::uint64_t>();
    const auto& sp = j.at("specials");
    m.specials.pad = sp.at("pad");
    m.specials.unk = sp.at("unk");
    m.specials.bos = sp.at("bos");
    m.specials.eos = sp.at("eos");
    m.specials.mask = sp.at("mask");
    if (j.contains("mask_policy")) {
      const auto& p = j["mask_policy"];
      m.mask_policy = MaskPolicy{p.at("mask_fraction"), p.at("mask_prob"), p.at("random_prob"),
                                 p.at("keep_prob"), p.at("seed")};
    }
    if (j.contains("epoch")) m.epoch = j["epoch"].get<std::uint32_t>();
    for (const auto& s : j.at("shards"))
      m.shards.push_back(ShardInfo{s.at("name"), s.at("records"), s.at("crc32")});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<SequenceBlock> read_block_shard(const std::filesystem::path& file) {
  return read_shard<SequenceBlock>(file, ShardKind::blocks);
}

std::vector<MaskedExample> read_masked_shard(const std::filesystem::path& file) {
  return read_shard<MaskedExample>(file, ShardKind::masked);
}

std::vector<SequenceBlock> read_block_shards(const std::filesystem::path& dir) {
  return read_all<SequenceBlock>(dir, ShardKind::blocks);
}

std::vector<MaskedExample> read_masked_shards(const std::filesystem::path& dir) {
  return read_all<MaskedExample>(dir, ShardKind::masked);
}

}  // namespace tweetforge
