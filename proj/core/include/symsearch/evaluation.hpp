#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "symsearch/retrieval.hpp"

namespace symsearch {

/// Three binary annotator labels for one (symptom, document) pair.
struct Judgment {
  int symptom_index = 0;
  std::string doc_id;
  std::vector<int> labels;

  friend bool operator==(const Judgment&, const Judgment&) = default;
};

enum class AggregationMode { Majority, Unanimity };

std::string_view to_string(AggregationMode m) noexcept;
AggregationMode parse_aggregation_mode(std::string_view s);

/// True when `labels` make the pair relevant under `mode`.
bool is_relevant(const std::vector<int>& labels, AggregationMode mode);

struct QrelsSet {
  AggregationMode mode = AggregationMode::Majority;
  std::map<int, std::set<std::string>> relevant;
  std::map<int, std::set<std::string>> judged;

  std::size_t relevant_count(int symptom) const;
  std::size_t total_relevant() const;
};

/// Majority: >= 2 of 3 labels set; unanimity: all 3. Every judged pair
/// lands in `judged`. Throws DataError on a label count other than 3, a
/// non-binary label or a repeated (symptom, doc) pair.
QrelsSet aggregate(const std::vector<Judgment>& judgments, AggregationMode mode);

/// Extended qrels: `symptom doc_id l1 l2 l3`.
std::string write_extended_qrels(const std::vector<Judgment>& judgments);
/// Standard qrels: `symptom 0 doc_id rel`. Labels must agree within each
/// judgment, since this format cannot carry annotator detail.
std::string write_standard_qrels(const std::vector<Judgment>& judgments);

/// Reads either qrels format (5 columns = extended, 4 = standard). A
/// standard `rel` > 0 becomes labels (1,1,1), 0 becomes (0,0,0).
std::vector<Judgment> read_qrels(std::string_view contents, const std::string& source = "<memory>");
std::vector<Judgment> read_qrels_file(const std::string& path);

using Pool = std::map<int, std::set<std::string>>;

/// Per symptom, the union over runs of the entries ranked <= k.
Pool pool_runs(const std::vector<std::vector<RunEntry>>& runs, std::size_t k = 50);
/// `symptom doc_id` per line, sorted.
std::string write_pool(const Pool& pool);

// Ranking metrics over binary relevance. Documents missing from the
// ranking, or unjudged, count as non-relevant. Functions that divide by
// |relevant| throw DataError when it is empty.
double average_precision(const std::vector<std::string>& ranking, const std::set<std::string>& relevant);
double r_precision(const std::vector<std::string>& ranking, const std::set<std::string>& relevant);
double precision_at(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
                    std::size_t n = 10);
double ndcg_at(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
               std::size_t n = 1000);

struct SymptomMetrics {
  int symptom_index = 0;
  std::size_t relevant = 0;
  std::size_t retrieved = 0;
  double ap = 0.0;
  double r_prec = 0.0;
  double p_at_10 = 0.0;
  double ndcg_at_1000 = 0.0;
};

struct MetricsReport {
  std::string run_tag;
  AggregationMode mode = AggregationMode::Majority;
  std::vector<SymptomMetrics> per_symptom;  // only symptoms with >= 1 relevant doc
  std::vector<int> excluded;                // symptoms with no relevant doc
  double mean_ap = 0.0;
  double mean_r_prec = 0.0;
  double mean_p_at_10 = 0.0;
  double mean_ndcg_at_1000 = 0.0;

  std::size_t evaluated_query_count() const { return per_symptom.size(); }

  /// Human-readable table followed by `metric \t symptom|mean \t value` lines.
  std::string to_text() const;
};

/// Scores symptoms 1..symptom_count. Throws DataError when the run names a
/// symptom outside that range.
MetricsReport evaluate_run(const std::vector<RunEntry>& run, const QrelsSet& qrels,
                           int symptom_count = 21);

}  // namespace symsearch
