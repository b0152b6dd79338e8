#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "statclaim/corpus.hpp"
#include "statclaim/extract.hpp"
#include "statclaim/fixture.hpp"
#include "statclaim/pipeline.hpp"
#include "statclaim/random.hpp"

using namespace statclaim;

namespace {

// Random walk per country, one observation per year.
MeasureSlice walk_slice(int n_countries, int n_years, std::uint64_t seed = 1) {
  Rng rng(seed);
  MeasureSlice s;
  s.table_id = "BENCH";
  s.combination.assignments = {{"MEASURE", "Units"}};
  s.window.start_year = 1990;
  s.window.end_year = 1990 + n_years - 1;
  for (int c = 0; c < n_countries; ++c) {
    char name[16];
    std::snprintf(name, sizeof name, "C%03d", c);
    double level = 100.0 * rng.unit();
    for (int y = 0; y < n_years; ++y) {
      level += 10.0 * (rng.unit() - 0.45);
      ObservationRow r;
      r.reference_area = name;
      r.year = 1990 + y;
      r.measure_values = {{"MEASURE", "Units"}};
      r.obs_value = std::round(level * 100.0) / 100.0;
      r.status = "normal";
      s.rows.push_back(std::move(r));
    }
  }
  return s;
}

}  // namespace

static void BM_ExtractTopK(benchmark::State& state) {
  const auto slice = walk_slice(static_cast<int>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(extract_top_k(slice));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(slice.rows.size()));
}
BENCHMARK(BM_ExtractTopK)->Arg(20)->Arg(60)->Arg(200);

static void BM_ExtractRankShifts(benchmark::State& state) {
  const auto slice = walk_slice(static_cast<int>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(extract_rank_shifts(slice));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(slice.rows.size()));
}
BENCHMARK(BM_ExtractRankShifts)->Arg(20)->Arg(60)->Arg(200);

static void BM_ExtractSeriesScans(benchmark::State& state) {
  const auto slice = walk_slice(50, static_cast<int>(state.range(0)));
  const auto series = build_series(slice);
  const SliceContext ctx{slice.table_id, slice.combination};
  for (auto _ : state) {
    for (const auto& s : series) {
      benchmark::DoNotOptimize(extract_constant_change(s, ctx));
      benchmark::DoNotOptimize(extract_historical_extreme(s, ctx));
    }
  }
}
BENCHMARK(BM_ExtractSeriesScans)->Arg(20)->Arg(60);

static void BM_ExtractAll(benchmark::State& state) {
  const auto slice = walk_slice(60, 30);
  for (auto _ : state) benchmark::DoNotOptimize(extract_all(slice));
}
BENCHMARK(BM_ExtractAll);

static void BM_ExtractCorpusThreads(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() / "statclaim_bench_extract";
  FixtureConfig fc;
  fc.n_tables = 8;
  const auto fx = generate_fixture(fc, dir);
  TableStore store;
  ingest_corpus(store, load_corpus_manifest(fx.corpus_manifest));
  const auto prepared = preprocess_corpus(store);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(extract_corpus(prepared, {}, threads));
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_ExtractCorpusThreads)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
