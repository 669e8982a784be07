#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace symsearch::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kServiceError = 3 };

struct Globals {
  std::string config;
  unsigned jobs = 1;
  bool force = false;
  bool verbose = false;
};

struct IngestArgs {
  std::string corpus_dir;
  std::string out;
  std::string stats;
  std::string detector;
};

struct GenerateArgs {
  std::string questionnaire;
  std::string out;
  std::string report;
  std::string prompt_template;
  bool mock = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::string> model;
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  std::optional<int> retries;
  std::optional<std::size_t> in_flight;
};

struct TextsArgs {
  std::string questionnaire;
  std::string queries;
  std::string corpus;
  std::string out_queries;
  std::string out_corpus;
};

struct RetrieveArgs {
  std::string questionnaire;
  std::string queries;
  std::string corpus;
  std::string corpus_emb;
  std::string query_emb;
  std::string out_dir;
  std::string tag;
  std::string origin = "original";
  std::string encoder = "default";
  std::optional<std::size_t> k;
  std::optional<std::size_t> cap;
};

struct EvaluateArgs {
  std::string run;
  std::string qrels;
  std::string mode = "majority";
  std::string out;
};

struct PoolArgs {
  std::vector<std::string> runs;
  std::size_t k = 50;
  std::string out;
};

int cmd_ingest(const Globals& g, IngestArgs a);
int cmd_generate(const Globals& g, GenerateArgs a);
int cmd_texts(const Globals& g, TextsArgs a);
int cmd_retrieve(const Globals& g, RetrieveArgs a);
int cmd_evaluate(const Globals& g, EvaluateArgs a);
int cmd_pool(const Globals& g, PoolArgs a);

}  // namespace symsearch::cli
