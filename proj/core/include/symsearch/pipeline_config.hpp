#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symsearch/retrieval.hpp"
#include "symsearch/synthgen.hpp"

namespace symsearch {

struct EncoderPaths {
  std::string corpus;   // corpus sentence embeddings
  std::string queries;  // query embeddings (original and generated)
};

/// Declarative experiment manifest.
///
///     # comment
///     questionnaire = data/questionnaire.tsv
///     queries       = out/generated.tsv
///     output_dir    = runs
///
///     [encoder mpnet]
///     corpus  = emb/corpus.mpnet.emb
///     queries = emb/queries.mpnet.emb
///
///     [run SemSearchOnBDI2Queries]
///     origin  = original
///     encoder = mpnet
///
/// Relative paths resolve against the manifest's directory. Top-level
/// per_query_k and cap become defaults for every run section.
struct PipelineConfig {
  std::string questionnaire;
  std::string queries;
  std::string corpus_dir;
  std::string corpus;
  std::string output_dir;
  std::string qrels;
  std::string detector = "builtin";
  unsigned jobs = 1;
  std::map<std::string, EncoderPaths> encoders;
  std::vector<RunConfig> runs;
  GenerationConfig generation;

  /// Throws DataError on duplicate run tags or a run naming an unknown encoder.
  void validate() const;

  static PipelineConfig parse(std::string_view contents, const std::string& source = "<memory>",
                              const std::string& base_dir = "");
  static PipelineConfig load(const std::string& path);
};

}  // namespace symsearch
