#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symsearch/query.hpp"
#include "symsearch/questionnaire.hpp"
#include "symsearch/vector_store.hpp"

namespace symsearch {

enum class OriginFilter { Original, Generated, All };

std::string_view to_string(OriginFilter f) noexcept;
OriginFilter parse_origin_filter(std::string_view s);
bool passes(OriginFilter f, QueryOrigin o) noexcept;

struct RunConfig {
  std::string run_tag;
  OriginFilter query_origin_filter = OriginFilter::All;
  std::string encoder_label;
  std::size_t per_query_k = 50;
  std::size_t cap = 1000;

  /// Throws DataError unless per_query_k >= 1, cap >= per_query_k and the
  /// tag is a whitespace-free token.
  void validate() const;
};

/// The five standard run configurations. Encoder
/// labels "mpnet" and "mentalroberta" name the embedding pairs to use.
std::vector<RunConfig> standard_run_configs();

struct RunEntry {
  int symptom_index = 0;
  std::string doc_id;
  int rank = 0;
  double score = 0.0;
  std::string run_tag;

  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

/// Top per_query_k per query, max-merged by doc_id, sorted by (score desc,
/// doc_id asc), truncated to cap and ranked from 1. Queries must share one
/// symptom; a query without a vector is reported by id.
std::vector<RunEntry> build_symptom_ranking(const std::vector<QueryText>& queries,
                                            const EmbeddingStore& corpus_store,
                                            const EmbeddingStore& query_store, const RunConfig& cfg,
                                            unsigned jobs = 1);

/// Rankings for symptoms 1..21 over the queries passing cfg's origin
/// filter, concatenated in symptom order.
std::vector<RunEntry> build_run(const Questionnaire& questionnaire,
                                const std::vector<QueryText>& queries,
                                const EmbeddingStore& corpus_store,
                                const EmbeddingStore& query_store, const RunConfig& cfg,
                                unsigned jobs = 1);

/// Checks the per-(tag, symptom) invariants: contiguous ranks from 1,
/// non-increasing scores, unique doc_ids, at most `cap` entries.
void validate_run(const std::vector<RunEntry>& entries, std::size_t cap = 1000);

/// `symptom Q0 doc_id rank score tag`, score with 6 decimals, sorted by
/// (symptom, rank). Refuses invariant-violating input.
std::string write_run(const std::vector<RunEntry>& entries, std::size_t cap = 1000);
std::vector<RunEntry> read_run(std::string_view contents, const std::string& source = "<memory>",
                               std::size_t cap = 1000);
std::vector<RunEntry> read_run_file(const std::string& path, std::size_t cap = 1000);

/// Doc ids of one symptom in rank order.
std::map<int, std::vector<std::string>> rankings_by_symptom(const std::vector<RunEntry>& entries);

}  // namespace symsearch
