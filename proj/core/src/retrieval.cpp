#include "symsearch/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

namespace symsearch {

std::string_view to_string(OriginFilter f) noexcept {
  switch (f) {
    case OriginFilter::Original: return "original";
    case OriginFilter::Generated: return "generated";
    case OriginFilter::All: return "all";
  }
  return "all";
}

OriginFilter parse_origin_filter(std::string_view s) {
  if (s == "original") return OriginFilter::Original;
  if (s == "generated") return OriginFilter::Generated;
  if (s == "all") return OriginFilter::All;
  throw DataError("unknown origin filter '" + std::string(s) + "' (original, generated, all)");
}

bool passes(OriginFilter f, QueryOrigin o) noexcept {
  switch (f) {
    case OriginFilter::Original: return o == QueryOrigin::Original;
    case OriginFilter::Generated: return o == QueryOrigin::Generated;
    case OriginFilter::All: return true;
  }
  return false;
}

void RunConfig::validate() const {
  if (!text::is_token(run_tag)) throw DataError("run tag '" + run_tag + "' must be a nonempty token");
  if (per_query_k < 1) throw DataError("run '" + run_tag + "': per_query_k must be >= 1");
  if (cap < per_query_k) throw DataError("run '" + run_tag + "': cap must be >= per_query_k");
}

std::vector<RunConfig> standard_run_configs() {
  return {
      {"SemSearchOnBDI2Queries", OriginFilter::Original, "mpnet", 50, 1000},
      {"SemSearchOnGeneratedQueries", OriginFilter::Generated, "mpnet", 50, 1000},
      {"SemSearchOnAllQueries", OriginFilter::All, "mpnet", 50, 1000},
      {"SemSearchOnBDI2QueriesMentalRoberta", OriginFilter::Original, "mentalroberta", 50, 1000},
      {"SemSearchOnGeneratedQueriesMentalRoberta", OriginFilter::Generated, "mentalroberta", 50, 1000},
  };
}

std::vector<RunEntry> build_symptom_ranking(const std::vector<QueryText>& queries,
                                            const EmbeddingStore& corpus_store,
                                            const EmbeddingStore& query_store, const RunConfig& cfg,
                                            unsigned jobs) {
  cfg.validate();
  if (queries.empty()) return {};
  const int symptom = queries.front().symptom_index;
  if (!corpus_store.empty() && corpus_store.dim() != query_store.dim()) {
    throw DataError("corpus embeddings have dim " + std::to_string(corpus_store.dim()) +
                    " but query embeddings have dim " + std::to_string(query_store.dim()));
  }

  std::unordered_map<std::string, float> best;
  for (const auto& q : queries) {
    if (q.symptom_index != symptom) {
      throw DataError("query '" + q.query_id + "' belongs to symptom " + std::to_string(q.symptom_index) +
                      ", expected " + std::to_string(symptom));
    }
    if (!query_store.contains(q.query_id)) {
      throw DataError("query '" + q.query_id + "' has no vector in the query embeddings");
    }
    for (auto& hit : top_k(corpus_store, query_store.find(q.query_id), cfg.per_query_k, jobs)) {
      auto [it, inserted] = best.try_emplace(std::move(hit.doc_id), hit.score);
      if (!inserted && hit.score > it->second) it->second = hit.score;
    }
  }

  std::vector<ScoredDoc> merged;
  merged.reserve(best.size());
  for (auto& [id, score] : best) merged.push_back({id, score});
  std::sort(merged.begin(), merged.end(), ranks_before);
  if (merged.size() > cfg.cap) merged.resize(cfg.cap);

  std::vector<RunEntry> out;
  out.reserve(merged.size());
  int rank = 0;
  for (auto& d : merged) {
    out.push_back({symptom, std::move(d.doc_id), ++rank, static_cast<double>(d.score), cfg.run_tag});
  }
  return out;
}

std::vector<RunEntry> build_run(const Questionnaire& questionnaire,
                                const std::vector<QueryText>& queries,
                                const EmbeddingStore& corpus_store,
                                const EmbeddingStore& query_store, const RunConfig& cfg,
                                unsigned jobs) {
  cfg.validate();
  validate_queries(queries, questionnaire);
  std::vector<RunEntry> out;
  for (const auto& s : questionnaire.symptoms()) {
    std::vector<QueryText> mine;
    for (const auto& q : queries) {
      if (q.symptom_index == s.index && passes(cfg.query_origin_filter, q.origin)) mine.push_back(q);
    }
    auto ranking = build_symptom_ranking(mine, corpus_store, query_store, cfg, jobs);
    std::move(ranking.begin(), ranking.end(), std::back_inserter(out));
  }
  return out;
}

void validate_run(const std::vector<RunEntry>& entries, std::size_t cap) {
  std::map<std::pair<std::string, int>, std::vector<const RunEntry*>> groups;
  for (const auto& e : entries) {
    if (e.symptom_index < 1) throw DataError("run entry with symptom index " + std::to_string(e.symptom_index));
    if (!text::is_token(e.doc_id)) throw DataError("run entry with invalid doc_id '" + e.doc_id + "'");
    if (!text::is_token(e.run_tag)) throw DataError("run entry with invalid run tag '" + e.run_tag + "'");
    if (e.rank < 1) {
      throw DataError("symptom " + std::to_string(e.symptom_index) + ", doc '" + e.doc_id +
                      "': rank must be >= 1");
    }
    if (!std::isfinite(e.score)) throw DataError("doc '" + e.doc_id + "': non-finite score");
    groups[{e.run_tag, e.symptom_index}].push_back(&e);
  }
  for (auto& [key, list] : groups) {
    const std::string where = "run '" + key.first + "', symptom " + std::to_string(key.second);
    if (list.size() > cap) {
      throw DataError(where + ": " + std::to_string(list.size()) + " entries exceed the cap of " +
                      std::to_string(cap));
    }
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
    std::unordered_set<std::string_view> docs;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i]->rank != static_cast<int>(i) + 1) throw DataError(where + ": ranks are not contiguous from 1");
      if (i > 0 && list[i]->score > list[i - 1]->score) {
        throw DataError(where + ": score increases at rank " + std::to_string(list[i]->rank));
      }
      if (!docs.insert(list[i]->doc_id).second) {
        throw DataError(where + ": duplicate doc_id '" + list[i]->doc_id + "'");
      }
    }
  }
}

std::string write_run(const std::vector<RunEntry>& entries, std::size_t cap) {
  validate_run(entries, cap);
  std::vector<const RunEntry*> sorted;
  sorted.reserve(entries.size());
  for (const auto& e : entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
    return std::tie(a->symptom_index, a->run_tag, a->rank) < std::tie(b->symptom_index, b->run_tag, b->rank);
  });
  std::string out;
  out.reserve(entries.size() * 48);
  char score[64];
  for (const auto* e : sorted) {
    std::snprintf(score, sizeof score, "%.6f", e->score);
    out += std::to_string(e->symptom_index);
    out += " Q0 ";
    out += e->doc_id;
    out += ' ';
    out += std::to_string(e->rank);
    out += ' ';
    out += score;
    out += ' ';
    out += e->run_tag;
    out += '\n';
  }
  return out;
}

namespace {
template <typename T>
bool parse_num(std::string_view s, T& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}
}  // namespace

std::vector<RunEntry> read_run(std::string_view contents, const std::string& source, std::size_t cap) {
  std::vector<RunEntry> out;
  text::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    if (text::trim(line).empty()) return;
    auto f = text::split_ws(line);
    if (f.size() != 6) throw ParseError(source, line_no, "expected 6 fields: symptom Q0 doc_id rank score tag");
    RunEntry e;
    if (!parse_num(f[0], e.symptom_index) || e.symptom_index < 1) {
      throw ParseError(source, line_no, "invalid symptom index '" + std::string(f[0]) + "'");
    }
    e.doc_id = std::string(f[2]);
    if (!parse_num(f[3], e.rank) || e.rank < 1) {
      throw ParseError(source, line_no, "invalid rank '" + std::string(f[3]) + "' (must be >= 1)");
    }
    // from_chars for double is not available on every libstdc++ we target.
    std::string score(f[4]);
    char* end = nullptr;
    e.score = std::strtod(score.c_str(), &end);
    if (end != score.c_str() + score.size() || !std::isfinite(e.score)) {
      throw ParseError(source, line_no, "invalid score '" + score + "'");
    }
    e.run_tag = std::string(f[5]);
    out.push_back(std::move(e));
  });
  try {
    validate_run(out, cap);
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
  return out;
}

std::vector<RunEntry> read_run_file(const std::string& path, std::size_t cap) {
  return read_run(text::read_file(path), path, cap);
}

std::map<int, std::vector<std::string>> rankings_by_symptom(const std::vector<RunEntry>& entries) {
  std::map<int, std::vector<const RunEntry*>> groups;
  for (const auto& e : entries) groups[e.symptom_index].push_back(&e);
  std::map<int, std::vector<std::string>> out;
  for (auto& [s, list] : groups) {
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
    auto& ids = out[s];
    ids.reserve(list.size());
    for (auto* e : list) ids.push_back(e->doc_id);
  }
  return out;
}

}  // namespace symsearch
