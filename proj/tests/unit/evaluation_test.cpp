#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "brute_force.hpp"
#include "symsearch/error.hpp"
#include "symsearch/evaluation.hpp"

using namespace symsearch;

namespace {

using Ranking = std::vector<std::string>;
using Rel = std::set<std::string>;

Ranking docs(int n, const std::string& prefix = "d") {
  Ranking out;
  for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<RunEntry> as_run(int symptom, const Ranking& r, const std::string& tag = "T") {
  std::vector<RunEntry> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    out.push_back({symptom, r[i], static_cast<int>(i) + 1, 1.0 - 0.001 * static_cast<double>(i), tag});
  }
  return out;
}

}  // namespace

TEST(Metrics, AveragePrecisionExamples) {
  EXPECT_NEAR(average_precision({"d1", "d2", "d3"}, {"d1", "d3"}), 0.8333333333333333, 1e-12);
  EXPECT_DOUBLE_EQ(average_precision({"d1", "d2", "x"}, {"d1", "d2"}), 1.0);
  EXPECT_DOUBLE_EQ(average_precision({"x", "y"}, {"d1"}), 0.0);
  EXPECT_THROW(average_precision({"d1"}, {}), DataError);
}

TEST(Metrics, RPrecisionExamples) {
  EXPECT_DOUBLE_EQ(r_precision({"d1", "dX", "d3", "d4"}, {"d1", "d3"}), 0.5);
  EXPECT_DOUBLE_EQ(r_precision({"d3", "d1"}, {"d1", "d3"}), 1.0);
  EXPECT_DOUBLE_EQ(r_precision({}, {"d1"}), 0.0);
}

TEST(Metrics, PrecisionAtTenExamples) {
  const auto ten = docs(10);
  const auto five = docs(5);
  EXPECT_DOUBLE_EQ(precision_at(ten, Rel(ten.begin(), ten.end())), 1.0);
  EXPECT_DOUBLE_EQ(precision_at(ten, {"d2", "d5", "d9", "d11"}), 0.3);
  EXPECT_DOUBLE_EQ(precision_at(five, Rel(five.begin(), five.end())), 0.5);
}

TEST(Metrics, NdcgExamples) {
  EXPECT_DOUBLE_EQ(ndcg_at({"d1", "x"}, {"d1"}), 1.0);
  EXPECT_NEAR(ndcg_at({"x", "d1"}, {"d1"}), 0.6309297535714575, 1e-12);
  EXPECT_DOUBLE_EQ(ndcg_at({"x", "y"}, {"d1"}), 0.0);
  // IDCG is bounded by the cutoff.
  EXPECT_DOUBLE_EQ(ndcg_at({"a", "b"}, {"a", "b", "c"}, 2), 1.0);
}

TEST(Metrics, MatchBruteForceOracle) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 500);
    Ranking r = docs(n);
    std::shuffle(r.begin(), r.end(), rng);
    r.resize(rng() % (n + 1));
    Rel rel;
    const int nrel = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < nrel; ++i) rel.insert("d" + std::to_string(1 + rng() % (n + 20)));
    EXPECT_NEAR(average_precision(r, rel), oracle::average_precision(r, rel), 1e-9);
    EXPECT_NEAR(r_precision(r, rel), oracle::r_precision(r, rel), 1e-9);
    EXPECT_NEAR(precision_at(r, rel, 10), oracle::precision_at(r, rel, 10), 1e-9);
    EXPECT_NEAR(ndcg_at(r, rel, 1000), oracle::ndcg_at(r, rel, 1000), 1e-9);
  }
}

TEST(Metrics, BoundsIdealAndReversal) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    Ranking r = docs(60);
    std::shuffle(r.begin(), r.end(), rng);
    Rel rel(r.begin(), r.begin() + 1 + rng() % 30);
    Ranking ideal(rel.begin(), rel.end());
    for (const auto& d : r) {
      if (!rel.count(d)) ideal.push_back(d);
    }
    Ranking reversed(ideal.rbegin(), ideal.rend());
    const std::vector<std::function<double(const Ranking&)>> metrics{
        [&](const Ranking& x) { return average_precision(x, rel); },
        [&](const Ranking& x) { return r_precision(x, rel); },
        [&](const Ranking& x) { return precision_at(x, rel, 10); },
        [&](const Ranking& x) { return ndcg_at(x, rel, 1000); }};
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      const double v = metrics[m](r);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      const double best = metrics[m](ideal);
      if (m != 2 || rel.size() >= 10) EXPECT_DOUBLE_EQ(best, 1.0);
      EXPECT_LE(metrics[m](reversed), best);
    }
  }
}

TEST(Metrics, PromotingRelevantDocNeverHurts) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    Ranking r = docs(40);
    std::shuffle(r.begin(), r.end(), rng);
    Rel rel;
    for (int i = 0; i < 10; ++i) rel.insert(r[rng() % r.size()]);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      if (rel.count(r[i]) || !rel.count(r[i + 1])) continue;
      Ranking swapped = r;
      std::swap(swapped[i], swapped[i + 1]);
      EXPECT_GE(average_precision(swapped, rel), average_precision(r, rel));
      EXPECT_GE(ndcg_at(swapped, rel), ndcg_at(r, rel));
    }
  }
}

TEST(Aggregate, LabelRules) {
  const std::vector<Judgment> j{{1, "a", {1, 1, 0}}, {1, "b", {1, 1, 1}}, {1, "c", {0, 0, 0}}};
  const auto maj = aggregate(j, AggregationMode::Majority);
  const auto una = aggregate(j, AggregationMode::Unanimity);
  EXPECT_EQ(maj.relevant.at(1), (Rel{"a", "b"}));
  EXPECT_EQ(una.relevant.at(1), (Rel{"b"}));
  EXPECT_EQ(maj.judged.at(1), (Rel{"a", "b", "c"}));
  EXPECT_EQ(una.judged.at(1), (Rel{"a", "b", "c"}));
  EXPECT_THROW(aggregate({{1, "a", {1, 1}}}, AggregationMode::Majority), DataError);
  EXPECT_THROW(aggregate({{1, "a", {1, 2, 0}}}, AggregationMode::Majority), DataError);
  EXPECT_THROW(aggregate({{1, "a", {1, 1, 0}}, {1, "a", {1, 1, 1}}}, AggregationMode::Majority), DataError);
}

TEST(Aggregate, UnanimitySubsetOfMajority) {
  std::mt19937 rng(1);
  std::vector<Judgment> j;
  for (int i = 0; i < 500; ++i) {
    j.push_back({1 + static_cast<int>(rng() % 21), "d" + std::to_string(i),
                 {int(rng() % 2), int(rng() % 2), int(rng() % 2)}});
  }
  const auto maj = aggregate(j, AggregationMode::Majority);
  const auto una = aggregate(j, AggregationMode::Unanimity);
  for (const auto& [sym, docs] : una.relevant) {
    for (const auto& d : docs) EXPECT_TRUE(maj.relevant.at(sym).count(d));
    EXPECT_LE(una.relevant_count(sym), maj.relevant_count(sym));
  }
  for (const auto& [sym, docs] : maj.relevant) {
    for (const auto& d : docs) EXPECT_TRUE(maj.judged.at(sym).count(d));
  }
}

TEST(Qrels, FormatsRoundTrip) {
  const std::vector<Judgment> j{{1, "a", {1, 1, 0}}, {2, "b", {0, 0, 0}}};
  EXPECT_EQ(write_extended_qrels(j), "1 a 1 1 0\n2 b 0 0 0\n");
  EXPECT_EQ(read_qrels(write_extended_qrels(j)), j);
  EXPECT_THROW(write_standard_qrels(j), DataError);
  const std::vector<Judgment> agreed{{1, "a", {1, 1, 1}}, {2, "b", {0, 0, 0}}};
  EXPECT_EQ(write_standard_qrels(agreed), "1 0 a 1\n2 0 b 0\n");
  EXPECT_EQ(read_qrels(write_standard_qrels(agreed)), agreed);
  EXPECT_EQ(read_qrels("3 0 x 2\n")[0].labels, (std::vector<int>{1, 1, 1}));
  EXPECT_THROW(read_qrels("1 a 1 1\n1 a 1 1 0 0\n"), ParseError);
}

TEST(Pool, UnionOfTopK) {
  const auto a = as_run(4, docs(60, "a"));
  const auto b = as_run(4, docs(60, "b"));
  const auto pool = pool_runs({a, b}, 50);
  EXPECT_EQ(pool.at(4).size(), 100u);
  EXPECT_EQ(pool_runs({a}, 50).at(4).size(), 50u);
  EXPECT_EQ(pool_runs({as_run(4, docs(20))}, 50).at(4).size(), 20u);
  const auto overlap = pool_runs({as_run(4, docs(60)), as_run(4, docs(55))}, 50);
  EXPECT_EQ(overlap.at(4).size(), 50u);
  EXPECT_EQ(write_pool({{2, {"x", "a"}}}), "2 a\n2 x\n");
}

TEST(Pool, SupersetOfEveryRunsTopK) {
  std::mt19937 rng(30);
  std::vector<std::vector<RunEntry>> runs;
  for (int k = 0; k < 5; ++k) {
    std::vector<RunEntry> run;
    for (int s = 1; s <= 21; ++s) {
      Ranking r = docs(200);
      std::shuffle(r.begin(), r.end(), rng);
      r.resize(rng() % 120);
      const auto part = as_run(s, r);
      run.insert(run.end(), part.begin(), part.end());
    }
    runs.push_back(run);
  }
  const auto pool = pool_runs(runs, 50);
  for (const auto& run : runs) {
    for (const auto& e : run) {
      if (e.rank <= 50) EXPECT_TRUE(pool.at(e.symptom_index).count(e.doc_id));
    }
  }
}

TEST(Evaluate, IdealRunAndExclusions) {
  std::vector<Judgment> j;
  std::vector<RunEntry> run;
  for (int s = 1; s <= 20; ++s) {
    Ranking r;
    for (int i = 0; i < 12; ++i) {
      const auto id = "s" + std::to_string(s) + "d" + std::to_string(i);
      j.push_back({s, id, {1, 1, 1}});
      r.push_back(id);
    }
    const auto part = as_run(s, r);
    run.insert(run.end(), part.begin(), part.end());
  }
  const auto report = evaluate_run(run, aggregate(j, AggregationMode::Majority));
  EXPECT_EQ(report.evaluated_query_count(), 20u);
  EXPECT_EQ(report.excluded, std::vector<int>{21});
  EXPECT_DOUBLE_EQ(report.mean_ap, 1.0);
  EXPECT_DOUBLE_EQ(report.mean_r_prec, 1.0);
  EXPECT_DOUBLE_EQ(report.mean_p_at_10, 1.0);
  EXPECT_DOUBLE_EQ(report.mean_ndcg_at_1000, 1.0);
  const auto txt = report.to_text();
  EXPECT_NE(txt.find("ap\tmean\t1.000000"), std::string::npos) << txt;

  run.push_back({22, "x", 1, 0.1, "T"});
  EXPECT_THROW(evaluate_run(run, aggregate(j, AggregationMode::Majority)), DataError);
}

TEST(Evaluate, MatchesOracleOnRandomFixture) {
  std::mt19937 rng(44);
  std::vector<Judgment> j;
  std::vector<RunEntry> run;
  std::map<int, Ranking> rankings;
  for (int s = 1; s <= 21; ++s) {
    Ranking r = docs(200, "s" + std::to_string(s) + "_");
    for (const auto& d : r) {
      if (rng() % 5 == 0) j.push_back({s, d, {int(rng() % 2), int(rng() % 2), int(rng() % 2)}});
    }
    std::shuffle(r.begin(), r.end(), rng);
    rankings[s] = r;
    const auto part = as_run(s, r);
    run.insert(run.end(), part.begin(), part.end());
  }
  const auto qrels = aggregate(j, AggregationMode::Majority);
  const auto report = evaluate_run(run, qrels);
  double sum_ap = 0;
  std::size_t counted = 0;
  for (const auto& m : report.per_symptom) {
    const auto& rel = qrels.relevant.at(m.symptom_index);
    const auto& r = rankings[m.symptom_index];
    EXPECT_NEAR(m.ap, oracle::average_precision(r, rel), 1e-6);
    EXPECT_NEAR(m.r_prec, oracle::r_precision(r, rel), 1e-6);
    EXPECT_NEAR(m.p_at_10, oracle::precision_at(r, rel, 10), 1e-6);
    EXPECT_NEAR(m.ndcg_at_1000, oracle::ndcg_at(r, rel, 1000), 1e-6);
    sum_ap += oracle::average_precision(r, rel);
    ++counted;
  }
  ASSERT_GT(counted, 0u);
  EXPECT_NEAR(report.mean_ap, sum_ap / static_cast<double>(counted), 1e-6);
}
