#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "statclaim/random.hpp"
#include "statclaim/retrieval.hpp"

using namespace statclaim;

namespace {

const std::vector<std::string> kWords{"road",   "deaths",  "gross", "domestic", "product", "capita",
                                      "air",    "traffic", "tax",   "revenue",  "labour",  "force",
                                      "energy", "supply",  "water", "health",   "spending", "births"};

std::string random_text(Rng& rng, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += rng.pick(kWords) + " ";
  return out;
}

std::vector<TableRepresentation> corpus_of(std::size_t n) {
  Rng rng(3);
  std::vector<TableRepresentation> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"T" + std::to_string(i), random_text(rng, 60), 0});
  return out;
}

}  // namespace

static void BM_Tokenize(benchmark::State& state) {
  Rng rng(1);
  const auto text = random_text(rng, 500);
  for (auto _ : state) benchmark::DoNotOptimize(tokenize(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize);

static void BM_Bm25Build(benchmark::State& state) {
  const auto corpus = corpus_of(static_cast<std::size_t>(state.range(0)));
  std::vector<std::string> docs;
  for (const auto& r : corpus) docs.push_back(r.text);
  for (auto _ : state) benchmark::DoNotOptimize(Bm25Index(docs));
}
BENCHMARK(BM_Bm25Build)->Arg(100)->Arg(1000);

static void BM_RetrieveTable(benchmark::State& state) {
  const auto corpus = corpus_of(static_cast<std::size_t>(state.range(0)));
  LexicalScorer scorer;
  retrieve_table("warm up", corpus, scorer);
  for (auto _ : state) {
    benchmark::DoNotOptimize(retrieve_table("road deaths per capita rose in 2015", corpus, scorer));
  }
}
BENCHMARK(BM_RetrieveTable)->Arg(100)->Arg(1000);

static void BM_SelectValues(benchmark::State& state) {
  std::vector<std::string> values;
  for (int i = 0; i < state.range(0); ++i) values.push_back("Country " + std::to_string(i));
  for (auto _ : state) benchmark::DoNotOptimize(select_values("Country 17 ranked third", values));
}
BENCHMARK(BM_SelectValues)->Arg(50)->Arg(500);

BENCHMARK_MAIN();
