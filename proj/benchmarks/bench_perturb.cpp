#include <benchmark/benchmark.h>

#include "statclaim/hashing.hpp"
#include "statclaim/perturb.hpp"
#include "statclaim/templates.hpp"

using namespace statclaim;

static void BM_PerturbNumeric(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(perturb_numeric(12.5, rng));
}
BENCHMARK(BM_PerturbNumeric);

static void BM_PerturbRank(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(perturb_rank(3, 60, rng));
}
BENCHMARK(BM_PerturbRank);

static void BM_ParseTemplate(benchmark::State& state) {
  const auto s = make_sample("ROAD", {}, HaveTraitPayload{"France", 2015, 3.4}, {{"France", 2015, 3.4}});
  const auto text = render_template(s);
  for (auto _ : state) benchmark::DoNotOptimize(parse_template(text));
}
BENCHMARK(BM_ParseTemplate);

static void BM_MakeFalseClaim(benchmark::State& state) {
  std::vector<EvidenceRow> rows;
  for (int i = 0; i < 40; ++i) rows.push_back({"C" + std::to_string(100 + i), 2010, 40.0 - i});
  const auto s = make_sample("T", {}, TopKPayload{"C100", 2010, 3, Direction::Top, 1, 40, 40}, rows);
  ClaimRecord c;
  c.claim_id = make_claim_id(s.sample_id, Language::En, Generator::Template);
  c.text = render_template(s);
  c.sample_id = s.sample_id;
  c.claim_type = s.claim_type;
  c.table_ids = {s.table_id};
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(make_false_claim(c, s, rng));
}
BENCHMARK(BM_MakeFalseClaim);

BENCHMARK_MAIN();
