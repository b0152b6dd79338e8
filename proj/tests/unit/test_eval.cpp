#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "statclaim/error.hpp"
#include "statclaim/eval.hpp"
#include "statclaim/random.hpp"

using namespace statclaim;

namespace {

ClaimRecord claim(const std::string& id, const std::string& sample_id, bool label, Language lang = Language::En) {
  ClaimRecord c;
  c.claim_id = id;
  c.sample_id = sample_id;
  c.label = label;
  c.language = lang;
  c.claim_type = ClaimType::HaveTrait;
  return c;
}

VerificationTrace trace(const std::string& id, Verdict v, const std::string& table,
                        std::vector<EvidenceRow> evidence = {}) {
  VerificationTrace t;
  t.claim_id = id;
  t.final_verdict = v;
  SubclaimTrace s;
  s.chosen_table = table;
  s.verdict = v;
  s.result_evidence = std::move(evidence);
  t.subclaims.push_back(s);
  return t;
}

}  // namespace

TEST(Accuracy, NeiIsNeverCorrect) {
  const std::map<std::string, bool> gold{{"a", true}, {"b", false}, {"c", true}, {"d", false}};
  EXPECT_DOUBLE_EQ(accuracy({{"a", Verdict::True}, {"b", Verdict::False}, {"c", Verdict::NEI}, {"d", Verdict::True}},
                            gold),
                   0.5);
  EXPECT_EQ(accuracy({}, gold), 0.0);
}

TEST(Accuracy, MissingGoldThrows) {
  try {
    accuracy({{"zz", Verdict::True}}, {{"a", true}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingGold);
  }
}

TEST(Accuracy, MeanAndSampleStd) {
  const auto m = mean_std({1.0, 0.5});
  EXPECT_DOUBLE_EQ(m.mean, 0.75);
  EXPECT_NEAR(m.stddev, 0.35355339, 1e-8);
  EXPECT_EQ(mean_std({0.3}).stddev, 0.0);
  const std::map<std::string, bool> gold{{"a", true}, {"b", false}};
  const auto runs = verdict_accuracy({{{"a", Verdict::True}, {"b", Verdict::False}},
                                      {{"a", Verdict::True}, {"b", Verdict::True}}},
                                     gold);
  EXPECT_DOUBLE_EQ(runs.mean, 0.75);
  EXPECT_EQ(runs.runs, (std::vector<double>{1.0, 0.5}));
}

TEST(MaskedFact, ToleranceBand) {
  EXPECT_TRUE(masked_fact_hit(100, 100, 0));
  EXPECT_FALSE(masked_fact_hit(100, 100.5, 0));
  EXPECT_TRUE(masked_fact_hit(100, 125, 0.25));
  EXPECT_TRUE(masked_fact_hit(100, 80, 0.25));  // 100 / 1.25
  EXPECT_FALSE(masked_fact_hit(100, 79.9, 0.25));
  EXPECT_FALSE(masked_fact_hit(100, 125.1, 0.25));
  EXPECT_TRUE(masked_fact_hit(10, 15, 0.5));
  EXPECT_TRUE(masked_fact_hit(0, 0, 0.5));
  EXPECT_FALSE(masked_fact_hit(0, 0.1, 0.5));
  EXPECT_FALSE(masked_fact_hit(-4, -5, 0.5));
  EXPECT_THROW(masked_fact_hit(1, 1, -0.1), Error);
}

TEST(MaskedFact, EvalCountsAndCurve) {
  const std::vector<MaskedPair> pairs{{100, 100}, {100, 120}, {100, 140}, {100, 300}, {0, 0}};
  const auto r = masked_fact_eval(pairs, 0.25);
  EXPECT_EQ(r.total, 5u);
  EXPECT_EQ(r.hits, 3u);
  EXPECT_EQ(r.nonpositive, 1u);
  const auto c = tolerance_curve(pairs, {0.5, 0.0, 0.25});
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_EQ(c.points[0], (std::pair<double, double>{0.0, 0.4}));
  EXPECT_DOUBLE_EQ(c.points[2].second, 0.8);
  EXPECT_TRUE(c.monotone());
}

TEST(MaskedFact, CurveIsMonotoneOnRandomData) {
  Rng rng(4);
  std::vector<MaskedPair> pairs;
  for (int i = 0; i < 300; ++i) pairs.push_back({1 + 100 * rng.unit(), 200 * rng.unit() - 20});
  EXPECT_TRUE(tolerance_curve(pairs, {0, 0.05, 0.1, 0.25, 0.5, 1, 2}).monotone());
}

TEST(Confusion, Metrics) {
  // 3 TP, 1 FN, 2 FP, 4 TN.
  std::vector<std::pair<bool, bool>> v;
  for (int i = 0; i < 3; ++i) v.emplace_back(true, true);
  v.emplace_back(true, false);
  for (int i = 0; i < 2; ++i) v.emplace_back(false, true);
  for (int i = 0; i < 4; ++i) v.emplace_back(false, false);
  const auto m = confusion_matrix(v);
  EXPECT_EQ(m.tp, 3u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_EQ(m.fp, 2u);
  EXPECT_EQ(m.tn, 4u);
  EXPECT_DOUBLE_EQ(m.precision(), 0.6);
  EXPECT_DOUBLE_EQ(m.recall(), 0.75);
  EXPECT_NEAR(m.f1(), 2 * 0.6 * 0.75 / 1.35, 1e-12);
  EXPECT_DOUBLE_EQ(m.percent(m.tn), 40.0);

  std::reverse(v.begin(), v.end());
  EXPECT_EQ(to_json(confusion_matrix(v)), to_json(m));
}

TEST(Confusion, EmptyIsZero) {
  const auto m = confusion_matrix({});
  EXPECT_EQ(m.precision(), 0.0);
  EXPECT_EQ(m.recall(), 0.0);
  EXPECT_EQ(m.f1(), 0.0);
  EXPECT_EQ(m.percent(0), 0.0);
}

TEST(Consistency, CellsOverTrueClaims) {
  const std::vector<ConsistencyItem> items{
      {"a", true, {100, 100}, true},    // both
      {"b", true, {100, 100}, false},   // only task 1
      {"c", true, {100, 200}, true},    // only task 2 at p = 0
      {"d", true, {100, 200}, false},   // neither
      {"e", false, {100, 100}, true},   // false claims are ignored
  };
  const auto rows = consistency_table(items, {0.0, 1.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].total, 4u);
  EXPECT_DOUBLE_EQ(rows[0].both, 25.0);
  EXPECT_DOUBLE_EQ(rows[0].only_task1, 25.0);
  EXPECT_DOUBLE_EQ(rows[0].only_task2, 25.0);
  EXPECT_DOUBLE_EQ(rows[0].neither, 25.0);
  EXPECT_DOUBLE_EQ(rows[1].both, 50.0);
  EXPECT_DOUBLE_EQ(rows[1].only_task1, 50.0);
  for (const auto& r : rows) EXPECT_NEAR(r.both + r.only_task1 + r.only_task2 + r.neither, 100.0, 1e-9);
}

TEST(Retrieval, TableAndDataHits) {
  const auto s1 = make_sample("T1", {}, HaveTraitPayload{"A", 2000, 1.0}, {{"A", 2000, 1.0}});
  const auto s2 = make_sample("T2", {}, HaveTraitPayload{"B", 2001, 2.0}, {{"B", 2001, 2.0}});
  const auto c1 = claim("c1", s1.sample_id, true);
  const auto c2 = claim("c2", s2.sample_id, false, Language::Zh);
  const auto c3 = claim("c3", s1.sample_id, false);
  const std::map<std::string, const ClaimRecord*> claims{{"c1", &c1}, {"c2", &c2}, {"c3", &c3}};
  const std::map<std::string, const DataSample*> samples{{s1.sample_id, &s1}, {s2.sample_id, &s2}};
  const std::vector<VerificationTrace> traces{
      trace("c1", Verdict::True, "T1", {{"A", 2000, 1.0}, {"A", 2001, 5.0}}),  // table and data
      trace("c2", Verdict::NEI, "T1"),                                        // wrong table
      trace("c3", Verdict::False, "T1", {{"A", 2000, 1.5}}),                  // table, wrong value
  };
  const auto r = retrieval_accuracy(traces, claims, samples);
  EXPECT_EQ(r.overall.count, 3u);
  EXPECT_EQ(r.overall.table_hits, 2u);
  EXPECT_EQ(r.overall.data_hits, 1u);
  EXPECT_EQ(r.by_language.at("zh").table_hits, 0u);
  EXPECT_EQ(r.by_verdict.at("True").data_hits, 1u);
  EXPECT_EQ(r.by_language_verdict.at("en").at("False").table_hits, 1u);

  // Pooled rate equals the count-weighted mean of the verdict groups.
  double weighted = 0;
  for (const auto& [v, cell] : r.by_verdict) weighted += cell.table_rate() * static_cast<double>(cell.count);
  EXPECT_DOUBLE_EQ(r.overall.table_rate(), weighted / static_cast<double>(r.overall.count));

  EXPECT_THROW(retrieval_accuracy({trace("nope", Verdict::True, "T1")}, claims, samples), Error);
}

TEST(Retrieval, ContainsEvidence) {
  const std::vector<EvidenceRow> result{{"A", 2000, 1.0}, {"B", 2000, 3.0}};
  EXPECT_TRUE(contains_evidence(result, {}));
  EXPECT_TRUE(contains_evidence(result, {{"B", 2000, 3.0 + 1e-12}}));
  EXPECT_FALSE(contains_evidence(result, {{"B", 2001, 3.0}}));
  EXPECT_FALSE(contains_evidence(result, {{"A", 2000, 1.0}, {"C", 2000, 1.0}}));
}

TEST(Report, SummarizesRuns) {
  const auto s1 = make_sample("T1", {}, HaveTraitPayload{"A", 2000, 1.0}, {{"A", 2000, 1.0}});
  const std::vector<ClaimRecord> claims{claim("c1", s1.sample_id, true), claim("c2", s1.sample_id, false)};
  const std::vector<VerificationTrace> run1{trace("c1", Verdict::True, "T1", {{"A", 2000, 1.0}}),
                                            trace("c2", Verdict::NEI, "T1")};
  const std::vector<VerificationTrace> run2{trace("c1", Verdict::True, "T1"), trace("c2", Verdict::False, "T1")};
  const auto r = evaluation_report({run1, run2}, claims, {s1});
  EXPECT_DOUBLE_EQ(r["verdict_accuracy"]["mean"].get<double>(), 0.75);
  EXPECT_EQ(r["claims"], 2);
  EXPECT_EQ(r["verdict_counts"]["False"]["NEI"], 1);
  EXPECT_EQ(r["confusion_excluding_nei"]["tp"], 1);
  EXPECT_EQ(r["retrieval"]["overall"]["data_hits"], 1);
  EXPECT_DOUBLE_EQ(r["accuracy_by_claim_type"]["HaveTrait"]["accuracy"].get<double>(), 0.5);
}
