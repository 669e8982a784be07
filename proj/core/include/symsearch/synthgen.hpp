#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symsearch/completion.hpp"
#include "symsearch/query.hpp"
#include "symsearch/questionnaire.hpp"

namespace symsearch {

/// Instruction prompt with the placeholders {N}, {symptom} and {item}.
class PromptTemplate {
 public:
  /// Throws DataError naming the first missing placeholder.
  explicit PromptTemplate(std::string text);

  /// The default instruction prompt.
  static PromptTemplate standard();
  static PromptTemplate load(const std::string& path);

  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

std::string build_prompt(const PromptTemplate& tmpl, std::size_t n, const Symptom& symptom,
                         const ResponseOption& option);

/// Splits a completion into posts: one per nonempty line, with leading
/// enumeration markers ("12." / "12)") and one surrounding pair of quotes
/// removed. Idempotent.
std::vector<std::string> postprocess_completion(std::string_view raw);

struct GenerationConfig {
  std::size_t n_per_option = 30;
  std::string model_name = "text-davinci-003";
  double temperature = 0.7;
  int max_tokens = 1024;
  int retries = 3;          // transport retries per call
  int extra_calls = 3;      // re-prompts per option when short of quota
  std::optional<std::uint64_t> seed;
  std::size_t in_flight = 4;
  BackoffPolicy backoff;

  void validate() const;
};

struct OptionReport {
  int symptom_index = 0;
  int option_index = 0;
  std::size_t produced = 0;
  int calls = 0;
  int retries = 0;
  std::size_t total_tokens = 0;
  bool resumed = false;
  std::string error;  // empty on success
};

struct GenerationReport {
  std::string model_name;
  std::size_t n_per_option = 0;
  std::vector<OptionReport> options;  // questionnaire order
  std::size_t duplicate_texts = 0;    // exact repeats across the dataset

  std::size_t total_texts() const;
  std::size_t shortfall_options() const;
  std::size_t failed_options() const;
  std::string to_json() const;
};

struct GenerationResult {
  std::vector<QueryText> queries;  // questionnaire order, then generation order
  GenerationReport report;
};

/// Receives each option's texts once that option is finished, in
/// questionnaire order, never concurrently.
using OptionSink = std::function<void(const std::vector<QueryText>&)>;

/// For every response option: prompt, complete, post-process, and
/// re-prompt up to cfg.extra_calls times until n_per_option texts exist.
/// A failing option is recorded and skipped; an AuthError aborts the run;
/// a ServiceError is thrown when every attempted option failed. Options in
/// `skip` are left out (already generated).
GenerationResult generate_dataset(const Questionnaire& q, const PromptTemplate& tmpl,
                                  CompletionClient& client, const GenerationConfig& cfg,
                                  const OptionSink& sink = {},
                                  const std::vector<std::pair<int, int>>& skip = {});

/// Resumable form: options already present in the query file at `path`
/// are kept, a torn trailing line is discarded, and new options are
/// appended as each finishes.
GenerationResult generate_to_file(const std::string& path, const Questionnaire& q,
                                  const PromptTemplate& tmpl, CompletionClient& client,
                                  const GenerationConfig& cfg);

}  // namespace symsearch
