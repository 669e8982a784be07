#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace symsearch {

/// Raw contents of an embedding file, before normalization.
///
/// Binary layout (little-endian):
///
///     magic "EMB1" | u32 version = 1 | u32 dim | u64 count
///     count x ( u16 id_len | id bytes | dim x f32 )
///
/// Records are self-delimiting, so a reader can stream vectors without
/// materializing the file.
struct EmbeddingFile {
  static constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t dim = 0;
  std::vector<std::string> ids;
  std::vector<float> values;  // row-major, ids.size() x dim

  std::span<const float> row(std::size_t i) const { return {values.data() + i * dim, dim}; }

  friend bool operator==(const EmbeddingFile&, const EmbeddingFile&) = default;
};

std::string write_embedding_binary(const EmbeddingFile& file);
EmbeddingFile read_embedding_binary(std::string_view bytes, const std::string& source = "<memory>");

/// One JSON object per line: {"id": "...", "vec": [...]}.
std::string write_embedding_jsonl(const EmbeddingFile& file);
EmbeddingFile read_embedding_jsonl(std::string_view contents, const std::string& source = "<memory>");

/// Reads either format; JSONL is detected by a leading '{'.
EmbeddingFile read_embedding_path(const std::string& path);

struct ScoredDoc {
  std::string doc_id;
  float score = 0.0f;

  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Result order: score descending, ties by ascending doc_id.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

/// Immutable id -> unit vector map of fixed dimension.
class EmbeddingStore {
 public:
  /// Tolerance on stored norms, and the raw-norm deviation above which a
  /// load warning is recorded.
  static constexpr double kNormTolerance = 1e-5;

  EmbeddingStore() = default;

  /// Normalizes every row. Throws DataError on zero vectors, non-finite
  /// values or duplicate ids (naming the id).
  static EmbeddingStore from_file(EmbeddingFile file);
  static EmbeddingStore load(const std::string& path);

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  std::span<const float> vector(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

  bool contains(std::string_view id) const;
  /// Throws DataError when `id` is absent.
  std::span<const float> find(std::string_view id) const;

  /// Non-fatal observations made at load time (e.g. rows that were not
  /// already unit length).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  EmbeddingFile to_file() const;

 private:
  std::uint32_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
};

/// L2-normalizes `v` in place (accumulating in double). Returns the
/// original norm; a zero vector is left untouched.
double normalize(std::span<float> v);

/// Dot product of unit vectors, accumulated in double and clamped to
/// [-1, 1]. Throws DataError on a dimension mismatch.
double cosine(std::span<const float> a, std::span<const float> b);

/// Exact top-k by cosine: min(k, size) results ordered by ranks_before.
/// The scan is split into blocks over up to `jobs` threads whose partial
/// heaps are merged.
std::vector<ScoredDoc> top_k(const EmbeddingStore& store, std::span<const float> query,
                             std::size_t k, unsigned jobs = 1);

}  // namespace symsearch
