#include <gtest/gtest.h>

#include <algorithm>

#include "statclaim/corpus.hpp"
#include "statclaim/extract.hpp"
#include "statclaim/oracle.hpp"
#include "statclaim/pipeline.hpp"
#include "statclaim/hashing.hpp"
#include "support.hpp"

using namespace statclaim;
using statclaim::testing::slice_of;

namespace {

std::string country(int i) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "C%02d", i);
  return buf;
}

/// n countries in one year with values 1..n (C01 smallest).
MeasureSlice ladder(int n, int year = 2020) {
  std::vector<EvidenceRow> rows;
  for (int i = 1; i <= n; ++i) rows.push_back({country(i), year, static_cast<double>(i)});
  return slice_of(rows);
}

CountrySeries series_of(const std::string& name, int first_year, const std::vector<double>& values) {
  CountrySeries s{name, {}};
  for (std::size_t i = 0; i < values.size(); ++i) s.points.push_back({first_year + static_cast<int>(i), values[i]});
  return s;
}

const SliceContext kCtx{"T", {{{"MEASURE", "Units"}}}};

template <typename P>
std::vector<P> payloads(const std::vector<DataSample>& samples) {
  std::vector<P> out;
  for (const auto& s : samples) out.push_back(std::get<P>(s.payload));
  return out;
}

}  // namespace

TEST(TopK, SixtyCountriesGiveFiveEachWay) {
  const auto out = extract_top_k(ladder(60));
  ASSERT_EQ(out.size(), 10u);
  for (const auto& p : payloads<TopKPayload>(out)) {
    EXPECT_EQ(p.k, 5);
    EXPECT_EQ(p.n_countries, 60);
    const int expected = p.direction == Direction::Top ? 61 - p.rank : p.rank;
    EXPECT_EQ(p.value, expected) << p.country;
  }
}

TEST(TopK, ThirtyFiveCountriesUseKThree) {
  const auto out = extract_top_k(ladder(35));
  ASSERT_EQ(out.size(), 6u);
  for (const auto& p : payloads<TopKPayload>(out)) EXPECT_EQ(p.k, 3);
}

TEST(TopK, BoundaryCountsFollowThresholds) {
  EXPECT_TRUE(extract_top_k(ladder(19)).empty());
  EXPECT_EQ(extract_top_k(ladder(20)).size(), 6u);
  EXPECT_EQ(payloads<TopKPayload>(extract_top_k(ladder(50)))[0].k, 3);
  EXPECT_EQ(payloads<TopKPayload>(extract_top_k(ladder(51)))[0].k, 5);
}

TEST(TopK, TiesBreakByAreaName) {
  std::vector<EvidenceRow> rows;
  for (int i = 1; i <= 20; ++i) rows.push_back({country(i), 2020, i <= 2 ? 100.0 : i});
  const auto ranked = rank_year(slice_of(rows), 2020);
  EXPECT_EQ(ranked[0].country, "C01");
  EXPECT_EQ(ranked[1].country, "C02");
  EXPECT_EQ(ranked[0].rank, 1);
}

TEST(TopK, EvidenceIsTheWholeYear) {
  const auto out = extract_top_k(ladder(25));
  for (const auto& s : out) EXPECT_EQ(s.evidence_rows.size(), 25u);
}

TEST(ConstantChange, EightYearRunGivesOneSample) {
  const auto out = extract_constant_change(series_of("A", 2000, {1, 2, 3, 4, 5, 6, 7, 8}), kCtx);
  ASSERT_EQ(out.size(), 1u);
  const auto p = std::get<ConstantChangePayload>(out[0].payload);
  EXPECT_EQ(p.direction, Direction::Increase);
  EXPECT_EQ(p.n_years, 8);
  EXPECT_EQ(p.start, (SeriesPoint{2000, 1}));
  EXPECT_EQ(p.end, (SeriesPoint{2007, 8}));
  EXPECT_EQ(out[0].evidence_rows.size(), 8u);
}

TEST(ConstantChange, SevenYearsIsTooShort) {
  EXPECT_TRUE(extract_constant_change(series_of("A", 2000, {7, 6, 5, 4, 3, 2, 1}), kCtx).empty());
}

TEST(ConstantChange, RunsAreMaximal) {
  // Ten rising years then a flat step: one run of 10, never its sub-runs.
  const auto out = extract_constant_change(series_of("A", 2000, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 10}), kCtx);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(std::get<ConstantChangePayload>(out[0].payload).n_years, 10);
}

TEST(ConstantChange, GapBreaksTheRun) {
  auto s = series_of("A", 2000, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  for (std::size_t i = 5; i < s.points.size(); ++i) s.points[i].year += 1;  // no 2005
  EXPECT_TRUE(extract_constant_change(s, kCtx).empty());
}

TEST(ConstantChange, FallingRun) {
  const auto out = extract_constant_change(series_of("A", 2000, {9, 8, 7, 6, 5, 4, 3, 2.5}), kCtx);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(std::get<ConstantChangePayload>(out[0].payload).direction, Direction::Decrease);
}

TEST(HistoricalExtreme, HighestInTwelveYears) {
  // 1991 holds 60; 1992..2002 stay lower; 2003 reaches 55.
  std::vector<double> v{10, 60};
  for (int y = 1992; y <= 2002; ++y) v.push_back(20 + (y % 3));
  v.push_back(55);
  const auto out = extract_historical_extreme(series_of("A", 1990, v), kCtx);
  std::vector<HistoricalExtremePayload> highs;
  for (const auto& p : payloads<HistoricalExtremePayload>(out)) {
    if (p.direction == Direction::Highest) highs.push_back(p);
  }
  ASSERT_EQ(highs.size(), 1u);
  EXPECT_EQ(highs[0].year, 2003);
  EXPECT_EQ(highs[0].n_years, 12);
  EXPECT_EQ(highs[0].value, 55);
}

TEST(HistoricalExtreme, RecentExceedanceSuppressesTheClaim) {
  std::vector<double> v(14, 20.0);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 20 + static_cast<double>(i % 2);
  v[8] = 60;  // five years before the last point
  v[13] = 55;
  const auto out = extract_historical_extreme(series_of("A", 1990, v), kCtx);
  for (const auto& p : payloads<HistoricalExtremePayload>(out)) {
    EXPECT_FALSE(p.direction == Direction::Highest && p.year == 2003);
  }
}

TEST(HistoricalExtreme, ConstantSeriesHasNoExtremes) {
  EXPECT_TRUE(extract_historical_extreme(series_of("A", 1990, std::vector<double>(20, 4.0)), kCtx).empty());
}

TEST(RankShift, SubstantialRule) {
  EXPECT_TRUE(is_substantial_rank_shift(10, 5, 30));    // ratio 2
  EXPECT_FALSE(is_substantial_rank_shift(27, 18, 40));  // 9 < 10, ratio 1.5
  EXPECT_TRUE(is_substantial_rank_shift(30, 20, 40));   // 10 positions
  EXPECT_FALSE(is_substantial_rank_shift(40, 31, 60));  // needs 12
  EXPECT_TRUE(is_substantial_rank_shift(43, 31, 60));
}

TEST(RankShift, PicksLargestShiftAndDerivesCotAndTraits) {
  // 30 countries over two years; C10 jumps from rank 21 to rank 1.
  std::vector<EvidenceRow> rows;
  for (int i = 1; i <= 30; ++i) {
    rows.push_back({country(i), 2010, static_cast<double>(i)});
    rows.push_back({country(i), 2011, i == 10 ? 100.0 : static_cast<double>(i)});
  }
  const auto ranks = extract_rank_shifts(slice_of(rows));
  const auto* found = static_cast<const ChangeInRankPayload*>(nullptr);
  for (const auto& s : ranks) {
    const auto& p = std::get<ChangeInRankPayload>(s.payload);
    if (p.country == "C10") found = &p;
  }
  ASSERT_NE(found, nullptr);
  EXPECT_EQ(found->rank_a, 21);
  EXPECT_EQ(found->rank_b, 1);
  EXPECT_EQ(found->n_countries_a, 30);

  const auto cot = derive_change_over_time(ranks);
  ASSERT_EQ(cot.size(), ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const auto& r = std::get<ChangeInRankPayload>(ranks[i].payload);
    const auto& c = std::get<ChangeOverTimePayload>(cot[i].payload);
    EXPECT_EQ(c.country, r.country);
    EXPECT_EQ(c.value_a, r.value_a);
    EXPECT_EQ(c.value_b, r.value_b);
    EXPECT_EQ(cot[i].evidence_rows.size(), 2u);
  }
  // Each rank pair yields two endpoint traits; the COT endpoints coincide.
  const auto traits = derive_have_trait(ranks, cot);
  EXPECT_EQ(traits.size(), 2 * ranks.size());
}

TEST(HaveTrait, SharedEndpointsAreDeduplicated) {
  const auto a = make_sample("T", {}, ChangeInRankPayload{"X", 2000, 2005, 30, 3, 40, 40, 1.0, 9.0}, {});
  const auto b = make_sample("T", {}, ChangeInRankPayload{"X", 2005, 2009, 3, 25, 40, 40, 9.0, 0.5}, {});
  EXPECT_EQ(derive_have_trait({a}, {}).size(), 2u);
  EXPECT_EQ(derive_have_trait({a, b}, {}).size(), 3u);
}

TEST(Samples, IdsAreContentHashes) {
  const auto a = make_sample("T", {}, HaveTraitPayload{"X", 2000, 1.0}, {{"X", 2000, 1.0}});
  const auto b = make_sample("T", {}, HaveTraitPayload{"X", 2000, 1.0}, {});
  const auto c = make_sample("U", {}, HaveTraitPayload{"X", 2000, 1.0}, {});
  EXPECT_EQ(a.sample_id, b.sample_id);
  EXPECT_NE(a.sample_id, c.sample_id);
  EXPECT_EQ(a.claim_type, ClaimType::HaveTrait);
}

TEST(Merge, SortsAndDropsDuplicates) {
  const auto s = statclaim::testing::random_slice(11);
  auto one = extract_all(s);
  auto two = extract_all(s);
  const auto merged = merge_batches(std::vector<ExtractionBatch>{one, two});
  EXPECT_EQ(merged.samples, one.samples);
  EXPECT_TRUE(std::is_sorted(merged.samples.begin(), merged.samples.end(),
                             [](const DataSample& a, const DataSample& b) { return a.sample_id < b.sample_id; }));
}

TEST(ExtractAll, MatchesOracleOnRandomSlices) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto s = statclaim::testing::random_slice(derive_seed(seed, "extract-test"));
    EXPECT_EQ(extract_all(s).samples, oracle::extract_all(s)) << "seed " << seed;
  }
}

TEST(ExtractAll, SamplesSatisfyInvariants) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = statclaim::testing::random_slice(seed);
    for (const auto& sample : extract_all(s).samples) {
      EXPECT_TRUE(check_sample_invariants(sample, {}, &s.window).empty()) << sample.sample_id;
    }
  }
}

TEST(ExtractAll, InvariantCheckerFlagsBrokenSamples) {
  auto bad = make_sample("T", {}, TopKPayload{"X", 2000, 3, Direction::Top, 4, 1.0, 30}, {});
  EXPECT_FALSE(check_sample_invariants(bad).empty());
  auto run = make_sample("T", {}, ConstantChangePayload{"X", Direction::Increase, 5, {2000, 1}, {2004, 5}}, {});
  EXPECT_FALSE(check_sample_invariants(run).empty());
}

TEST(ExtractCorpus, ThreadCountDoesNotChangeOutput) {
  statclaim::testing::TempDir dir;
  FixtureConfig cfg;
  cfg.n_tables = 4;
  cfg.n_countries = 26;
  const auto fixture = generate_fixture(cfg, dir.path());
  TableStore store;
  ingest_corpus(store, load_corpus_manifest(fixture.corpus_manifest));
  const auto prepared = preprocess_corpus(store);
  const auto one = extract_corpus(prepared, {}, 1);
  const auto many = extract_corpus(prepared, {}, 6);
  EXPECT_FALSE(one.samples.empty());
  EXPECT_EQ(one.samples, many.samples);

  std::map<std::string, std::size_t> per_type;
  for (const auto& s : one.samples) ++per_type[std::string(to_string(s.claim_type))];
  for (const auto& [type, n] : fixture.totals) EXPECT_EQ(per_type[type], n) << type;
}
