#include "symsearch/vector_store.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <thread>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

static_assert(std::endian::native == std::endian::little,
              "embedding file I/O assumes a little-endian host");

namespace symsearch {

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(std::string_view bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw ParseError(source_, pos_, std::string("truncated file while reading ") + what);
    }
  }

  std::string_view bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string write_embedding_binary(const EmbeddingFile& file) {
  if (file.values.size() != file.ids.size() * file.dim) {
    throw DataError("embedding file: value count does not match ids x dim");
  }
  std::string out;
  out.reserve(20 + file.ids.size() * (2 + 16 + 4 * static_cast<std::size_t>(file.dim)));
  out.append(EmbeddingFile::kMagic, 4);
  put<std::uint32_t>(out, EmbeddingFile::kVersion);
  put<std::uint32_t>(out, file.dim);
  put<std::uint64_t>(out, file.ids.size());
  for (std::size_t i = 0; i < file.ids.size(); ++i) {
    const auto& id = file.ids[i];
    if (id.empty() || id.size() > 0xFFFF) throw DataError("embedding id length out of range: '" + id + "'");
    put<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out += id;
    auto r = file.row(i);
    out.append(reinterpret_cast<const char*>(r.data()), r.size_bytes());
  }
  return out;
}

EmbeddingFile read_embedding_binary(std::string_view bytes, const std::string& source) {
  Reader rd(bytes, source);
  auto magic = rd.take(4, "magic");
  if (magic != std::string_view(EmbeddingFile::kMagic, 4)) {
    throw ParseError(source, 0, "bad magic (expected EMB1)");
  }
  const auto version = rd.get<std::uint32_t>("version");
  if (version != EmbeddingFile::kVersion) {
    throw ParseError(source, 4, "unsupported version " + std::to_string(version));
  }
  EmbeddingFile f;
  f.dim = rd.get<std::uint32_t>("dim");
  if (f.dim == 0) throw ParseError(source, 8, "dim must be positive");
  const auto count = rd.get<std::uint64_t>("count");
  const std::size_t row_bytes = 4 * static_cast<std::size_t>(f.dim);
  // Each record needs at least 2 + 1 + row_bytes bytes; reject absurd counts early.
  if (count > rd.remaining() / (3 + row_bytes)) {
    throw ParseError(source, rd.pos(), "truncated file: header announces " + std::to_string(count) +
                                           " records");
  }
  f.ids.reserve(count);
  f.values.resize(count * f.dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = rd.get<std::uint16_t>("id length");
    if (len == 0) throw ParseError(source, rd.pos() - 2, "record " + std::to_string(i) + " has an empty id");
    f.ids.emplace_back(rd.take(len, "id"));
    auto raw = rd.take(row_bytes, "vector");
    std::memcpy(f.values.data() + i * f.dim, raw.data(), row_bytes);
  }
  if (rd.remaining() != 0) {
    throw ParseError(source, rd.pos(), std::to_string(rd.remaining()) + " trailing bytes after last record");
  }
  return f;
}

std::string write_embedding_jsonl(const EmbeddingFile& file) {
  std::string out;
  for (std::size_t i = 0; i < file.ids.size(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = file.ids[i];
    auto r = file.row(i);
    j["vec"] = std::vector<float>(r.begin(), r.end());
    out += j.dump();
    out += '\n';
  }
  return out;
}

EmbeddingFile read_embedding_jsonl(std::string_view contents, const std::string& source) {
  EmbeddingFile f;
  text::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    if (text::trim(line).empty()) return;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("vec") ||
        !j["vec"].is_array()) {
      throw ParseError(source, line_no, "expected {\"id\": string, \"vec\": [numbers]}");
    }
    const auto& vec = j["vec"];
    if (f.ids.empty()) {
      if (vec.empty()) throw ParseError(source, line_no, "empty vector");
      f.dim = static_cast<std::uint32_t>(vec.size());
    } else if (vec.size() != f.dim) {
      throw ParseError(source, line_no, "dim " + std::to_string(vec.size()) + " disagrees with " +
                                            std::to_string(f.dim));
    }
    for (const auto& x : vec) {
      if (!x.is_number()) throw ParseError(source, line_no, "non-numeric vector component");
      f.values.push_back(x.get<float>());
    }
    f.ids.push_back(j["id"].get<std::string>());
  });
  return f;
}

EmbeddingFile read_embedding_path(const std::string& path) {
  const std::string bytes = text::read_file(path);
  auto first = text::trim(bytes.substr(0, std::min<std::size_t>(bytes.size(), 64)));
  if (!first.empty() && first.front() == '{') return read_embedding_jsonl(bytes, path);
  return read_embedding_binary(bytes, path);
}

double normalize(std::span<float> v) {
  double ss = 0.0;
  for (float x : v) ss += static_cast<double>(x) * static_cast<double>(x);
  const double norm = std::sqrt(ss);
  if (norm == 0.0) return 0.0;
  for (float& x : v) x = static_cast<float>(static_cast<double>(x) / norm);
  return norm;
}

EmbeddingStore EmbeddingStore::from_file(EmbeddingFile file) {
  if (file.dim == 0 && !file.ids.empty()) throw DataError("embedding store: dim must be positive");
  if (file.values.size() != file.ids.size() * static_cast<std::size_t>(file.dim)) {
    throw DataError("embedding store: value count does not match ids x dim");
  }
  EmbeddingStore s;
  s.dim_ = file.dim;
  s.ids_ = std::move(file.ids);
  s.values_ = std::move(file.values);
  s.index_.reserve(s.ids_.size());
  std::size_t off_unit = 0;
  for (std::size_t i = 0; i < s.ids_.size(); ++i) {
    const auto& id = s.ids_[i];
    if (!s.index_.emplace(id, i).second) throw DataError("duplicate embedding id '" + id + "'");
    std::span<float> row(s.values_.data() + i * s.dim_, s.dim_);
    if (!std::all_of(row.begin(), row.end(), [](float x) { return std::isfinite(x); })) {
      throw DataError("embedding '" + id + "' has non-finite components");
    }
    const double norm = normalize(row);
    if (norm == 0.0) throw DataError("embedding '" + id + "' is a zero vector");
    if (std::abs(norm - 1.0) > kNormTolerance) ++off_unit;
  }
  if (off_unit > 0) {
    s.warnings_.push_back(std::to_string(off_unit) + " of " + std::to_string(s.ids_.size()) +
                          " vectors were not unit length and have been normalized");
  }
  return s;
}

EmbeddingStore EmbeddingStore::load(const std::string& path) {
  try {
    return from_file(read_embedding_path(path));
  } catch (const ParseError&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

bool EmbeddingStore::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

std::span<const float> EmbeddingStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw DataError("no embedding for id '" + std::string(id) + "'");
  return vector(it->second);
}

EmbeddingFile EmbeddingStore::to_file() const {
  EmbeddingFile f;
  f.dim = dim_;
  f.ids = ids_;
  f.values = values_;
  return f;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw DataError("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return std::clamp(acc, -1.0, 1.0);
}

namespace {

struct Candidate {
  float score;
  std::size_t row;
};

// Bounded heap whose top is the weakest retained candidate.
class TopKHeap {
  struct Cmp {
    const TopKHeap* self;
    bool operator()(const Candidate& a, const Candidate& b) const { return self->better(a, b); }
  };
  Cmp cmp() const { return Cmp{this}; }

 public:
  TopKHeap(const EmbeddingStore& store, std::size_t k) : store_(store), k_(k) { heap_.reserve(k); }

  void offer(Candidate c) {
    if (heap_.size() < k_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end(), cmp());
    } else if (better(c, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), cmp());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end(), cmp());
    }
  }

  std::vector<Candidate>& items() { return heap_; }

  bool better(const Candidate& a, const Candidate& b) const {
    if (a.score != b.score) return a.score > b.score;
    return store_.id(a.row) < store_.id(b.row);
  }

 private:
  const EmbeddingStore& store_;
  std::size_t k_;
  std::vector<Candidate> heap_;
};

void scan(const EmbeddingStore& store, std::span<const float> q, std::size_t begin, std::size_t end,
          TopKHeap& heap) {
  for (std::size_t i = begin; i < end; ++i) {
    heap.offer({static_cast<float>(cosine(store.vector(i), q)), i});
  }
}

}  // namespace

std::vector<ScoredDoc> top_k(const EmbeddingStore& store, std::span<const float> query,
                             std::size_t k, unsigned jobs) {
  if (query.size() != store.dim() && !store.empty()) {
    throw DataError("top_k: query dim " + std::to_string(query.size()) + " does not match store dim " +
                    std::to_string(store.dim()));
  }
  k = std::min(k, store.size());
  if (k == 0) return {};

  constexpr std::size_t kMinBlock = 4096;
  const std::size_t n = store.size();
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(jobs, n / kMinBlock));

  TopKHeap merged(store, k);
  if (workers == 1) {
    scan(store, query, 0, n, merged);
  } else {
    std::vector<TopKHeap> partial;
    partial.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) partial.emplace_back(store, k);
    {
      std::vector<std::jthread> threads;
      const std::size_t block = (n + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * block;
        const std::size_t e = std::min(n, b + block);
        threads.emplace_back([&, b, e, w] { scan(store, query, b, e, partial[w]); });
      }
    }
    for (auto& p : partial) {
      for (const auto& c : p.items()) merged.offer(c);
    }
  }

  auto& items = merged.items();
  std::sort(items.begin(), items.end(), [&](const Candidate& a, const Candidate& b) { return merged.better(a, b); });
  std::vector<ScoredDoc> out;
  out.reserve(items.size());
  for (const auto& c : items) out.push_back({store.id(c.row), c.score});
  return out;
}

}  // namespace symsearch
