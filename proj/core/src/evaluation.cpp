#include "symsearch/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "symsearch/error.hpp"
#include "symsearch/text_util.hpp"

namespace symsearch {

std::string_view to_string(AggregationMode m) noexcept {
  return m == AggregationMode::Majority ? "majority" : "unanimity";
}

AggregationMode parse_aggregation_mode(std::string_view s) {
  if (s == "majority") return AggregationMode::Majority;
  if (s == "unanimity") return AggregationMode::Unanimity;
  throw DataError("unknown aggregation mode '" + std::string(s) + "' (majority, unanimity)");
}

bool is_relevant(const std::vector<int>& labels, AggregationMode mode) {
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  return mode == AggregationMode::Majority ? positives >= 2
                                           : positives == static_cast<long>(labels.size());
}

std::size_t QrelsSet::relevant_count(int symptom) const {
  auto it = relevant.find(symptom);
  return it == relevant.end() ? 0 : it->second.size();
}

std::size_t QrelsSet::total_relevant() const {
  std::size_t n = 0;
  for (const auto& [s, docs] : relevant) n += docs.size();
  return n;
}

QrelsSet aggregate(const std::vector<Judgment>& judgments, AggregationMode mode) {
  QrelsSet q;
  q.mode = mode;
  for (const auto& j : judgments) {
    const std::string where = "judgment (" + std::to_string(j.symptom_index) + ", " + j.doc_id + ")";
    if (j.labels.size() != 3) {
      throw DataError(where + ": expected 3 labels, got " + std::to_string(j.labels.size()));
    }
    if (std::any_of(j.labels.begin(), j.labels.end(), [](int l) { return l != 0 && l != 1; })) {
      throw DataError(where + ": labels must be 0 or 1");
    }
    if (!q.judged[j.symptom_index].insert(j.doc_id).second) throw DataError(where + ": judged twice");
    if (is_relevant(j.labels, mode)) q.relevant[j.symptom_index].insert(j.doc_id);
  }
  return q;
}

std::string write_extended_qrels(const std::vector<Judgment>& judgments) {
  std::string out;
  for (const auto& j : judgments) {
    if (j.labels.size() != 3) throw DataError("extended qrels need exactly 3 labels per judgment");
    out += std::to_string(j.symptom_index) + ' ' + j.doc_id;
    for (int l : j.labels) out += ' ' + std::to_string(l);
    out += '\n';
  }
  return out;
}

std::string write_standard_qrels(const std::vector<Judgment>& judgments) {
  std::string out;
  for (const auto& j : judgments) {
    if (j.labels.empty() || std::adjacent_find(j.labels.begin(), j.labels.end(), std::not_equal_to<>()) != j.labels.end()) {
      throw DataError("judgment (" + std::to_string(j.symptom_index) + ", " + j.doc_id +
                      "): standard qrels cannot represent disagreeing labels");
    }
    out += std::to_string(j.symptom_index) + " 0 " + j.doc_id + ' ' + std::to_string(j.labels.front()) + '\n';
  }
  return out;
}

namespace {
bool parse_int(std::string_view s, int& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}
}  // namespace

std::vector<Judgment> read_qrels(std::string_view contents, const std::string& source) {
  std::vector<Judgment> out;
  text::for_each_line(contents, [&](std::size_t line_no, std::string_view line) {
    if (text::trim(line).empty()) return;
    auto f = text::split_ws(line);
    Judgment j;
    if (!parse_int(f[0], j.symptom_index) || j.symptom_index < 1) {
      throw ParseError(source, line_no, "invalid symptom index '" + std::string(f[0]) + "'");
    }
    if (f.size() == 5) {
      j.doc_id = std::string(f[1]);
      for (std::size_t i = 2; i < 5; ++i) {
        int l = 0;
        if (!parse_int(f[i], l) || (l != 0 && l != 1)) {
          throw ParseError(source, line_no, "label '" + std::string(f[i]) + "' must be 0 or 1");
        }
        j.labels.push_back(l);
      }
    } else if (f.size() == 4) {
      j.doc_id = std::string(f[2]);
      int rel = 0;
      if (!parse_int(f[3], rel) || rel < 0) {
        throw ParseError(source, line_no, "invalid relevance '" + std::string(f[3]) + "'");
      }
      j.labels.assign(3, rel > 0 ? 1 : 0);
    } else {
      throw ParseError(source, line_no,
                       "expected 'symptom doc_id l1 l2 l3' or 'symptom 0 doc_id rel', got " +
                           std::to_string(f.size()) + " fields");
    }
    out.push_back(std::move(j));
  });
  return out;
}

std::vector<Judgment> read_qrels_file(const std::string& path) {
  return read_qrels(text::read_file(path), path);
}

Pool pool_runs(const std::vector<std::vector<RunEntry>>& runs, std::size_t k) {
  Pool pool;
  for (const auto& run : runs) {
    for (const auto& e : run) {
      if (e.rank >= 1 && static_cast<std::size_t>(e.rank) <= k) pool[e.symptom_index].insert(e.doc_id);
    }
  }
  return pool;
}

std::string write_pool(const Pool& pool) {
  std::string out;
  for (const auto& [s, docs] : pool) {
    for (const auto& d : docs) out += std::to_string(s) + ' ' + d + '\n';
  }
  return out;
}

namespace {
void require_relevant(const std::set<std::string>& relevant, const char* metric) {
  if (relevant.empty()) throw DataError(std::string(metric) + ": relevant set is empty");
}
}  // namespace

double average_precision(const std::vector<std::string>& ranking, const std::set<std::string>& relevant) {
  require_relevant(relevant, "average_precision");
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (relevant.count(ranking[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double r_precision(const std::vector<std::string>& ranking, const std::set<std::string>& relevant) {
  require_relevant(relevant, "r_precision");
  const std::size_t r = relevant.size();
  const std::size_t depth = std::min(r, ranking.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += relevant.count(ranking[i]);
  return static_cast<double>(hits) / static_cast<double>(r);
}

double precision_at(const std::vector<std::string>& ranking, const std::set<std::string>& relevant,
                    std::size_t n) {
  if (n == 0) throw DataError("precision_at: n must be >= 1");
  const std::size_t depth = std::min(n, ranking.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += relevant.count(ranking[i]);
  return static_cast<double>(hits) / static_cast<double>(n);
}

double ndcg_at(const std::vector<std::string>& ranking, const std::set<std::string>& relevant, std::size_t n) {
  require_relevant(relevant, "ndcg_at");
  const std::size_t depth = std::min(n, ranking.size());
  double dcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (relevant.count(ranking[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(relevant.size(), n);
  for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

MetricsReport evaluate_run(const std::vector<RunEntry>& run, const QrelsSet& qrels, int symptom_count) {
  MetricsReport rep;
  rep.mode = qrels.mode;
  for (const auto& e : run) {
    if (e.symptom_index < 1 || e.symptom_index > symptom_count) {
      throw DataError("run references unknown symptom index " + std::to_string(e.symptom_index));
    }
    if (rep.run_tag.empty()) rep.run_tag = e.run_tag;
  }
  const auto rankings = rankings_by_symptom(run);
  static const std::vector<std::string> kEmpty;
  for (int s = 1; s <= symptom_count; ++s) {
    auto rel_it = qrels.relevant.find(s);
    if (rel_it == qrels.relevant.end() || rel_it->second.empty()) {
      rep.excluded.push_back(s);
      continue;
    }
    const auto& rel = rel_it->second;
    auto rk = rankings.find(s);
    const auto& ranking = rk == rankings.end() ? kEmpty : rk->second;
    SymptomMetrics m;
    m.symptom_index = s;
    m.relevant = rel.size();
    m.retrieved = ranking.size();
    m.ap = average_precision(ranking, rel);
    m.r_prec = r_precision(ranking, rel);
    m.p_at_10 = precision_at(ranking, rel, 10);
    m.ndcg_at_1000 = ndcg_at(ranking, rel, 1000);
    rep.per_symptom.push_back(m);
  }
  if (!rep.per_symptom.empty()) {
    const double n = static_cast<double>(rep.per_symptom.size());
    for (const auto& m : rep.per_symptom) {
      rep.mean_ap += m.ap;
      rep.mean_r_prec += m.r_prec;
      rep.mean_p_at_10 += m.p_at_10;
      rep.mean_ndcg_at_1000 += m.ndcg_at_1000;
    }
    rep.mean_ap /= n;
    rep.mean_r_prec /= n;
    rep.mean_p_at_10 /= n;
    rep.mean_ndcg_at_1000 /= n;
  }
  return rep;
}

std::string MetricsReport::to_text() const {
  std::string out;
  char buf[256];
  std::size_t rel_total = 0;
  for (const auto& m : per_symptom) rel_total += m.relevant;
  out += "# run: " + (run_tag.empty() ? std::string("-") : run_tag) + "\n";
  out += "# aggregation: " + std::string(to_string(mode)) + "\n";
  out += "# evaluated symptoms: " + std::to_string(per_symptom.size()) + "\n";
  out += "# relevant documents: " + std::to_string(rel_total) + "\n";
  out += "# excluded (no relevant documents):";
  if (excluded.empty()) out += " none";
  for (int s : excluded) out += ' ' + std::to_string(s);
  out += "\n#\n";
  std::snprintf(buf, sizeof buf, "# %-7s %8s %9s %8s %8s %8s %12s\n", "symptom", "relevant", "retrieved",
                "AP", "R-Prec", "P@10", "NDCG@1000");
  out += buf;
  for (const auto& m : per_symptom) {
    std::snprintf(buf, sizeof buf, "# %-7d %8zu %9zu %8.4f %8.4f %8.4f %12.4f\n", m.symptom_index, m.relevant,
                  m.retrieved, m.ap, m.r_prec, m.p_at_10, m.ndcg_at_1000);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "# %-7s %8zu %9s %8.4f %8.4f %8.4f %12.4f\n", "mean", rel_total, "", mean_ap,
                mean_r_prec, mean_p_at_10, mean_ndcg_at_1000);
  out += buf;

  auto line = [&](const char* metric, const std::string& who, double v) {
    std::snprintf(buf, sizeof buf, "%s\t%s\t%.6f\n", metric, who.c_str(), v);
    out += buf;
  };
  for (const auto& m : per_symptom) {
    const std::string s = std::to_string(m.symptom_index);
    line("ap", s, m.ap);
    line("r_prec", s, m.r_prec);
    line("p_at_10", s, m.p_at_10);
    line("ndcg_at_1000", s, m.ndcg_at_1000);
  }
  line("ap", "mean", mean_ap);
  line("r_prec", "mean", mean_r_prec);
  line("p_at_10", "mean", mean_p_at_10);
  line("ndcg_at_1000", "mean", mean_ndcg_at_1000);
  return out;
}

}  // namespace symsearch
