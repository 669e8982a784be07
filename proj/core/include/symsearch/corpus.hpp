#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "symsearch/language.hpp"

namespace symsearch {

/// One corpus sentence. `doc_id` is the DOCNO of the source file and must
/// be unique across the whole corpus.
struct SentenceRecord {
  std::string doc_id;
  std::string user_id;
  std::string text;
  bool kept = true;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct CorpusStats {
  std::size_t users = 0;
  std::size_t sentences_total = 0;
  std::size_t sentences_kept = 0;
  std::size_t dropped_non_english = 0;
  std::size_t dropped_empty = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;

  std::string to_json() const;
};

/// Parses a TREC-style document file. Tags are case-insensitive; DOC,
/// DOCNO and TEXT are read, other tags inside a DOC are skipped, content
/// outside DOC blocks is ignored. Errors carry the byte offset of the
/// offending block.
std::vector<SentenceRecord> parse_trec(std::string_view contents, const std::string& user_id,
                                       const std::string& source = "<memory>");
std::vector<SentenceRecord> parse_trec_file(std::istream& in, const std::string& user_id,
                                            const std::string& source = "<stream>");

/// Writes DOC/DOCNO/TEXT blocks; parse_trec(write_trec(r)) recovers r's ids and texts.
std::string write_trec(const std::vector<SentenceRecord>& records);

/// Removes `http://`, `https://` and token-initial `www.` spans up to the
/// next whitespace, then collapses whitespace to single spaces.
std::string strip_urls(std::string_view text);

/// Sentences with fewer tokens than this after URL stripping are dropped as empty.
inline constexpr std::size_t kMinTokens = 2;

/// Sets each record's text to its URL-stripped form and its kept flag from
/// the token-count rule and the detector. Idempotent.
std::vector<SentenceRecord> preprocess_corpus(std::vector<SentenceRecord> records,
                                              const LanguageDetector& detector,
                                              CorpusStats* stats = nullptr);

struct IngestResult {
  std::vector<SentenceRecord> records;
  CorpusStats stats;
};

/// Parses every regular file in `dir` (user_id = file stem, files visited in
/// name order) and preprocesses the result. Parsing uses up to `jobs`
/// threads; doc_id uniqueness is checked once at the merge.
IngestResult ingest_directory(const std::string& dir, const LanguageDetector& detector,
                              unsigned jobs = 1);

/// Canonical corpus file: `doc_id \t user_id \t kept(0|1) \t text` per line.
std::string write_corpus(const std::vector<SentenceRecord>& records);
std::vector<SentenceRecord> read_corpus(std::string_view contents,
                                        const std::string& source = "<memory>");

/// Throws DataError when two records share a doc_id.
void check_unique_doc_ids(const std::vector<SentenceRecord>& records);

}  // namespace symsearch
