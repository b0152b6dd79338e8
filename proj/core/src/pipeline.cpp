#include "statclaim/pipeline.hpp"

#include <algorithm>
#include <set>

#include "statclaim/corpus.hpp"
#include "statclaim/error.hpp"
#include "statclaim/eval.hpp"
#include "statclaim/hashing.hpp"
#include "statclaim/parallel.hpp"
#include "statclaim/retrieval.hpp"
#include "statclaim/scripted.hpp"
#include "statclaim/serialize.hpp"

namespace statclaim {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw Error(ErrorCode::InvalidArgument, "unknown config key " + where + "." + key);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, message);
}

/// Runs one stage, tagging failures with its name.
template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "stage " + name + ": " + e.message(), e.line());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "stage " + name + ": " + e.what());
  }
}

std::string file_hash(const std::filesystem::path& p) { return sha256_file(p); }

}  // namespace

PipelineConfig pipeline_config_from_json(const json& j) {
  check_keys(j, "config",
             {"out_dir", "corpus", "seed", "threads", "fixture", "window", "extract", "generate", "perturb", "split",
              "verify"});
  PipelineConfig c;
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("corpus")) c.corpus = j.at("corpus").get<std::string>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  read(j, "threads", c.threads);
  if (j.contains("fixture")) {
    const auto& f = j.at("fixture");
    check_keys(f, "fixture", {"n_tables", "n_countries", "n_years", "seed", "start_year"});
    read(f, "n_tables", c.fixture.n_tables);
    read(f, "n_countries", c.fixture.n_countries);
    read(f, "n_years", c.fixture.n_years);
    read(f, "seed", c.fixture.seed);
    read(f, "start_year", c.fixture.start_year);
  }
  if (j.contains("window")) {
    const auto& w = j.at("window");
    check_keys(w, "window", {"coverage_fraction", "min_countries", "min_years"});
    read(w, "coverage_fraction", c.window.coverage_fraction);
    read(w, "min_countries", c.window.min_countries);
    read(w, "min_years", c.window.min_years);
  }
  if (j.contains("extract")) {
    const auto& e = j.at("extract");
    check_keys(e, "extract",
               {"top_k_min_countries", "top_k_large_above", "k_large", "k_small", "min_run_years", "min_extreme_years",
                "rank_shift_min_positions", "rank_shift_fraction", "rank_ratio"});
    read(e, "top_k_min_countries", c.extract.top_k_min_countries);
    read(e, "top_k_large_above", c.extract.top_k_large_above);
    read(e, "k_large", c.extract.k_large);
    read(e, "k_small", c.extract.k_small);
    read(e, "min_run_years", c.extract.min_run_years);
    read(e, "min_extreme_years", c.extract.min_extreme_years);
    read(e, "rank_shift_min_positions", c.extract.rank_shift_min_positions);
    read(e, "rank_shift_fraction", c.extract.rank_shift_fraction);
    read(e, "rank_ratio", c.extract.rank_ratio);
  }
  if (j.contains("generate")) {
    const auto& g = j.at("generate");
    check_keys(g, "generate", {"generator", "url", "languages", "caps", "fallback_to_template"});
    read(g, "generator", c.generator);
    read(g, "url", c.generator_url);
    read(g, "fallback_to_template", c.claimgen.generate.fallback_to_template);
    if (g.contains("languages")) {
      c.claimgen.languages.clear();
      for (const auto& l : g.at("languages")) {
        auto lang = parse_language(l.get<std::string>());
        require(lang.has_value(), "unknown language " + l.dump());
        c.claimgen.languages.push_back(*lang);
      }
    }
    if (g.contains("caps")) {
      check_keys(g.at("caps"), "generate.caps", {"en", "other"});
      read(g.at("caps"), "en", c.claimgen.caps.english);
      read(g.at("caps"), "other", c.claimgen.caps.other);
    }
  }
  if (j.contains("perturb")) {
    const auto& p = j.at("perturb");
    check_keys(p, "perturb",
               {"scaling_factors", "rank_shift_floor", "rank_shift_fraction", "shift_min", "shift_max", "extend_min",
                "extend_max"});
    read(p, "scaling_factors", c.perturb.scaling_factors);
    read(p, "rank_shift_floor", c.perturb.rank_shift_floor);
    read(p, "rank_shift_fraction", c.perturb.rank_shift_fraction);
    read(p, "shift_min", c.perturb.shift_min);
    read(p, "shift_max", c.perturb.shift_max);
    read(p, "extend_min", c.perturb.extend_min);
    read(p, "extend_max", c.perturb.extend_max);
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    check_keys(s, "split", {"holdout_fraction", "test_cap"});
    read(s, "holdout_fraction", c.split.holdout_fraction);
    if (s.contains("test_cap") && !s.at("test_cap").is_null()) c.split.test_cap = s.at("test_cap").get<std::size_t>();
  }
  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    check_keys(v, "verify",
               {"backend", "adapter_url", "model", "scorer", "scorer_url", "rerank", "lossy_fraction", "claims",
                "max_claims", "gold_tables", "top_n", "value_cap", "max_attempts", "passthrough_decompose",
                "adapter_synthesis"});
    read(v, "backend", c.verify.backend);
    read(v, "adapter_url", c.verify.adapter_url);
    read(v, "model", c.verify.model);
    read(v, "scorer", c.verify.scorer);
    read(v, "scorer_url", c.verify.scorer_url);
    read(v, "rerank", c.verify.rerank);
    read(v, "lossy_fraction", c.verify.lossy_fraction);
    read(v, "claims", c.verify.claims);
    read(v, "max_claims", c.verify.max_claims);
    read(v, "gold_tables", c.verify.verifier.gold_tables);
    read(v, "top_n", c.verify.verifier.top_n);
    read(v, "value_cap", c.verify.verifier.value_cap);
    read(v, "max_attempts", c.verify.verifier.max_attempts);
    read(v, "passthrough_decompose", c.verify.verifier.passthrough_decompose);
    read(v, "adapter_synthesis", c.verify.verifier.adapter_synthesis);
  }
  return c;
}

json to_json(const PipelineConfig& c) {
  std::vector<std::string> langs;
  for (auto l : c.claimgen.languages) langs.emplace_back(to_string(l));
  json j{{"out_dir", c.out_dir.generic_string()},
         {"corpus", c.corpus.generic_string()},
         {"threads", c.threads},
         {"fixture",
          {{"n_tables", c.fixture.n_tables},
           {"n_countries", c.fixture.n_countries},
           {"n_years", c.fixture.n_years},
           {"seed", c.fixture.seed},
           {"start_year", c.fixture.start_year}}},
         {"window",
          {{"coverage_fraction", c.window.coverage_fraction},
           {"min_countries", c.window.min_countries},
           {"min_years", c.window.min_years}}},
         {"extract",
          {{"top_k_min_countries", c.extract.top_k_min_countries},
           {"top_k_large_above", c.extract.top_k_large_above},
           {"k_large", c.extract.k_large},
           {"k_small", c.extract.k_small},
           {"min_run_years", c.extract.min_run_years},
           {"min_extreme_years", c.extract.min_extreme_years},
           {"rank_shift_min_positions", c.extract.rank_shift_min_positions},
           {"rank_shift_fraction", c.extract.rank_shift_fraction},
           {"rank_ratio", c.extract.rank_ratio}}},
         {"generate",
          {{"generator", c.generator},
           {"url", c.generator_url},
           {"languages", langs},
           {"caps", {{"en", c.claimgen.caps.english}, {"other", c.claimgen.caps.other}}},
           {"fallback_to_template", c.claimgen.generate.fallback_to_template}}},
         {"perturb",
          {{"scaling_factors", c.perturb.scaling_factors},
           {"rank_shift_floor", c.perturb.rank_shift_floor},
           {"rank_shift_fraction", c.perturb.rank_shift_fraction},
           {"shift_min", c.perturb.shift_min},
           {"shift_max", c.perturb.shift_max},
           {"extend_min", c.perturb.extend_min},
           {"extend_max", c.perturb.extend_max}}},
         {"split",
          {{"holdout_fraction", c.split.holdout_fraction},
           {"test_cap", c.split.test_cap ? json(*c.split.test_cap) : json(nullptr)}}},
         {"verify",
          {{"backend", c.verify.backend},
           {"adapter_url", c.verify.adapter_url},
           {"model", c.verify.model},
           {"scorer", c.verify.scorer},
           {"scorer_url", c.verify.scorer_url},
           {"rerank", c.verify.rerank},
           {"lossy_fraction", c.verify.lossy_fraction},
           {"claims", c.verify.claims},
           {"max_claims", c.verify.max_claims},
           {"gold_tables", c.verify.verifier.gold_tables},
           {"top_n", c.verify.verifier.top_n},
           {"value_cap", c.verify.verifier.value_cap},
           {"max_attempts", c.verify.verifier.max_attempts},
           {"passthrough_decompose", c.verify.verifier.passthrough_decompose},
           {"adapter_synthesis", c.verify.verifier.adapter_synthesis}}}};
  if (c.seed) j["seed"] = *c.seed;
  return j;
}

void validate(const PipelineConfig& c) {
  require(c.seed.has_value(), "a seed is required");
  require(!c.out_dir.empty(), "out_dir is required");
  require(c.window.coverage_fraction > 0 && c.window.coverage_fraction <= 1, "window.coverage_fraction in (0, 1]");
  require(c.window.min_countries >= 1, "window.min_countries >= 1");
  require(c.window.min_years >= 1, "window.min_years >= 1");
  require(c.extract.k_small >= 1 && c.extract.k_large >= 1, "k values >= 1");
  require(c.extract.min_run_years >= 2, "extract.min_run_years >= 2");
  require(c.extract.min_extreme_years >= 1, "extract.min_extreme_years >= 1");
  require(c.extract.rank_shift_fraction > 0 && c.extract.rank_shift_fraction <= 1, "rank_shift_fraction in (0, 1]");
  require(c.extract.rank_ratio > 1, "extract.rank_ratio > 1");
  require(c.claimgen.caps.english > 0 && c.claimgen.caps.other > 0, "caps must be positive");
  require(!c.claimgen.languages.empty(), "at least one language");
  require(c.generator == "template" || c.generator == "http", "generate.generator is template or http");
  require(c.generator != "http" || !c.generator_url.empty(), "generate.url is required for http generation");
  require(!c.perturb.scaling_factors.empty(), "perturb.scaling_factors is empty");
  for (double f : c.perturb.scaling_factors) require(f > 0 && f != 1.0, "scaling factors must be positive and not 1");
  require(c.perturb.shift_min >= 1 && c.perturb.shift_min <= c.perturb.shift_max, "perturb shift range");
  require(c.perturb.extend_min >= 1 && c.perturb.extend_min <= c.perturb.extend_max, "perturb extend range");
  require(c.split.holdout_fraction > 0 && c.split.holdout_fraction < 1, "split.holdout_fraction in (0, 1)");
  require(c.verify.backend == "oracle" || c.verify.backend == "http", "verify.backend is oracle or http");
  require(c.verify.backend != "http" || !c.verify.adapter_url.empty(), "verify.adapter_url is required");
  require(c.verify.scorer == "lexical" || c.verify.scorer == "http", "verify.scorer is lexical or http");
  require(c.verify.scorer != "http" || !c.verify.scorer_url.empty(), "verify.scorer_url is required");
  require(c.verify.lossy_fraction >= 0 && c.verify.lossy_fraction <= 1, "verify.lossy_fraction in [0, 1]");
  require(c.verify.claims == "test" || c.verify.claims == "all", "verify.claims is test or all");
  require(c.verify.verifier.max_attempts >= 1 && c.verify.verifier.max_attempts <= 3, "max_attempts in [1, 3]");
  require(c.verify.verifier.top_n >= 1, "verify.top_n >= 1");
  require(c.threads >= 1, "threads >= 1");
}

std::uint64_t stage_seed(const PipelineConfig& config, const std::string& name) {
  if (!config.seed) throw Error(ErrorCode::InvalidArgument, "a seed is required");
  return derive_seed(*config.seed, name);
}

json to_json(const RunSummary& summary) {
  json stages = json::array();
  for (const auto& s : summary.stages) stages.push_back({{"name", s.name}, {"counts", s.counts}, {"outputs", s.outputs}});
  return {{"stages", stages}};
}

ExtractionBatch extract_corpus(const PreprocessResult& prepared, const ExtractConfig& config, unsigned threads) {
  std::vector<std::pair<const PreparedTable*, const MeasureCombination*>> jobs;
  for (const auto& t : prepared.tables) {
    for (const auto& [combination, n] : t.combinations) jobs.emplace_back(&t, &combination);
  }
  std::vector<ExtractionBatch> batches(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    const auto& [table, combination] = jobs[i];
    batches[i] = extract_all(slice(table->view, *combination, table->window), config);
  });
  return merge_batches(std::move(batches));
}

std::map<std::string, TableContext> table_contexts(const TableStore& store) {
  std::map<std::string, TableContext> out;
  for (const auto& t : store.tables()) out[t.table_id] = context_of(t);
  return out;
}

std::map<std::string, std::vector<EvidenceRow>> measure_rows(const PreprocessResult& prepared) {
  std::map<std::string, std::vector<EvidenceRow>> out;
  for (const auto& t : prepared.tables) {
    if (t.view.rows.empty()) continue;
    TimeWindow all;
    all.start_year = t.view.rows.front().year;
    all.end_year = all.start_year;
    for (const auto& r : t.view.rows) {
      all.start_year = std::min(all.start_year, r.year);
      all.end_year = std::max(all.end_year, r.year);
    }
    for (const auto& [combination, n] : t.combinations) {
      auto& rows = out[t.view.table.table_id + "|" + combination.label()];
      for (const auto& r : slice(t.view, combination, all).rows) rows.push_back({r.reference_area, r.year, *r.obs_value});
    }
  }
  return out;
}

std::shared_ptr<ChatAdapter> make_verifier_adapter(const VerifyStageConfig& config, const TableStore& store,
                                                   std::uint64_t seed) {
  std::shared_ptr<ChatAdapter> base;
  if (config.backend == "oracle") {
    base = std::make_shared<GoldOracleAdapter>(store);
  } else {
    auto http = HttpAdapterConfig::from_env();
    http.base_url = config.adapter_url;
    if (!config.model.empty()) http.model = config.model;
    base = std::make_shared<CachingAdapter>(std::make_shared<HttpChatAdapter>(http));
  }
  if (config.lossy_fraction > 0) base = std::make_shared<LossySqlAdapter>(base, config.lossy_fraction, seed);
  return base;
}

std::unique_ptr<RetrievalScorer> make_scorer(const VerifyStageConfig& config) {
  if (config.scorer == "http") {
    HttpScorerConfig h;
    h.base_url = config.scorer_url;
    return std::make_unique<HttpEmbeddingScorer>(h);
  }
  return std::make_unique<LexicalScorer>();
}

std::unique_ptr<Reranker> make_reranker(const VerifyStageConfig& config) {
  if (!config.rerank || config.scorer_url.empty()) return nullptr;
  HttpScorerConfig h;
  h.base_url = config.scorer_url;
  return std::make_unique<HttpReranker>(h);
}

RunSummary run_pipeline(const PipelineConfig& config) {
  validate(config);
  const auto& out = config.out_dir;
  std::filesystem::create_directories(out);
  RunSummary summary;

  std::filesystem::path corpus = config.corpus;
  if (corpus.empty()) {
    auto fx = stage("fixture", [&] { return generate_fixture(config.fixture, out / "fixture"); });
    corpus = fx.corpus_manifest;
    StageSummary s{"fixture", {{"tables", config.fixture.n_tables}}, {}};
    s.outputs["fixture/expected.json"] = file_hash(fx.expected_manifest);
    summary.stages.push_back(s);
  }

  TableStore store;
  stage("ingest", [&] {
    const auto tables = ingest_corpus(store, load_corpus_manifest(corpus));
    std::int64_t rows = 0;
    for (const auto& t : tables) rows += static_cast<std::int64_t>(t.row_count);
    summary.stages.push_back({"ingest", {{"tables", static_cast<std::int64_t>(tables.size())}, {"rows", rows}}, {}});
    return 0;
  });

  const auto prepared = stage("preprocess", [&] {
    auto p = preprocess_corpus(store, config.window);
    json reports = json::array();
    for (const auto& r : p.reports) reports.push_back(to_json(r));
    write_json(out / "preprocess.json", reports);
    std::int64_t combos = 0;
    for (const auto& t : p.tables) combos += static_cast<std::int64_t>(t.combinations.size());
    summary.stages.push_back({"preprocess",
                              {{"included_tables", static_cast<std::int64_t>(p.tables.size())},
                               {"excluded_tables", static_cast<std::int64_t>(p.reports.size() - p.tables.size())},
                               {"combinations", combos}},
                              {{"preprocess.json", file_hash(out / "preprocess.json")}}});
    return p;
  });

  const auto samples = stage("extract", [&] {
    auto batch = extract_corpus(prepared, config.extract, config.threads);
    write_samples(out / "samples.jsonl", batch.samples);
    StageSummary s{"extract", {{"samples", static_cast<std::int64_t>(batch.samples.size())}}, {}};
    for (const auto& sample : batch.samples) ++s.counts["type." + std::string(to_string(sample.claim_type))];
    s.outputs["samples.jsonl"] = file_hash(out / "samples.jsonl");
    summary.stages.push_back(s);
    return std::move(batch.samples);
  });
  std::map<std::string, const DataSample*> sample_by_id;
  for (const auto& s : samples) sample_by_id[s.sample_id] = &s;

  const auto true_claims = stage("generate", [&] {
    std::shared_ptr<ChatAdapter> adapter;
    if (config.generator == "http") {
      auto http = HttpAdapterConfig::from_env();
      http.base_url = config.generator_url;
      adapter = std::make_shared<CachingAdapter>(std::make_shared<HttpChatAdapter>(http));
    }
    RuleJudge rule;
    auto cfg = config.claimgen;
    cfg.threads = config.threads;
    ClaimGenStats stats;
    auto claims = generate_true_claims(samples, table_contexts(store), adapter.get(), {&rule}, cfg,
                                       stage_seed(config, "generate"), &stats);
    summary.stages.push_back({"generate",
                              {{"selected", static_cast<std::int64_t>(stats.selected)},
                               {"generated", static_cast<std::int64_t>(stats.generated)},
                               {"kept", static_cast<std::int64_t>(stats.kept)},
                               {"dropped_by_judges", static_cast<std::int64_t>(stats.dropped_by_judges)},
                               {"failed", static_cast<std::int64_t>(stats.failed)}},
                              {}});
    return claims;
  });

  const auto claims = stage("perturb", [&] {
    PerturbStats stats;
    const auto rows = measure_rows(prepared);
    auto all = add_false_claims(true_claims, sample_by_id, stage_seed(config, "perturb"), config.perturb, &stats, &rows);
    write_claims(out / "claims.jsonl", all);
    StageSummary s{"perturb",
                   {{"true", static_cast<std::int64_t>(true_claims.size())},
                    {"false", static_cast<std::int64_t>(stats.perturbed)},
                    {"unrecoverable", static_cast<std::int64_t>(stats.unrecoverable)},
                    {"no_contradiction", static_cast<std::int64_t>(stats.no_contradiction)}},
                   {{"claims.jsonl", file_hash(out / "claims.jsonl")}}};
    for (const auto& [family, n] : stats.by_family) s.counts["family." + family] = static_cast<std::int64_t>(n);
    summary.stages.push_back(s);
    return all;
  });

  const auto manifest = stage("split", [&] {
    auto m = split(claims, stage_seed(config, "split"), config.split);
    write_json(out / "split.json", to_json(m));
    std::set<std::string> train(m.train_claim_ids.begin(), m.train_claim_ids.end());
    std::set<std::string> test(m.test_claim_ids.begin(), m.test_claim_ids.end());
    std::vector<ClaimRecord> train_claims, test_claims;
    for (const auto& c : claims) {
      if (train.count(c.claim_id)) train_claims.push_back(c);
      if (test.count(c.claim_id)) test_claims.push_back(c);
    }
    write_claims(out / "train.jsonl", train_claims);
    write_claims(out / "test.jsonl", test_claims);
    summary.stages.push_back({"split",
                              {{"holdout_tables", static_cast<std::int64_t>(m.holdout_tables.size())},
                               {"train", static_cast<std::int64_t>(m.train_claim_ids.size())},
                               {"test", static_cast<std::int64_t>(m.test_claim_ids.size())},
                               {"discarded", static_cast<std::int64_t>(m.discarded_claim_ids.size())}},
                              {{"split.json", file_hash(out / "split.json")},
                               {"train.jsonl", file_hash(out / "train.jsonl")},
                               {"test.jsonl", file_hash(out / "test.jsonl")}}});
    return m;
  });

  const auto traces = stage("verify", [&] {
    std::set<std::string> wanted(manifest.test_claim_ids.begin(), manifest.test_claim_ids.end());
    std::vector<ClaimToVerify> inputs;
    for (const auto& c : claims) {
      if (config.verify.claims == "test" && !wanted.count(c.claim_id)) continue;
      inputs.push_back({c.claim_id, c.text, c.table_ids.empty() ? std::string() : c.table_ids.front()});
    }
    if (config.verify.max_claims && inputs.size() > config.verify.max_claims) inputs.resize(config.verify.max_claims);
    auto adapter = make_verifier_adapter(config.verify, store, stage_seed(config, "lossy"));
    auto scorer = make_scorer(config.verify);
    auto reranker = make_reranker(config.verify);
    auto vcfg = config.verify.verifier;
    vcfg.threads = config.threads;
    Verifier verifier(store, *adapter, scorer.get(), vcfg, reranker.get());
    auto t = verifier.verify_all(inputs);
    write_traces(out / "traces.jsonl", t);
    summary.stages.push_back({"verify",
                              {{"claims", static_cast<std::int64_t>(t.size())}},
                              {{"traces.jsonl", file_hash(out / "traces.jsonl")}}});
    return t;
  });

  stage("evaluate", [&] {
    const auto report = evaluation_report({traces}, claims, samples);
    write_json(out / "report.json", report);
    summary.stages.push_back({"evaluate", {}, {{"report.json", file_hash(out / "report.json")}}});
    return 0;
  });

  write_json(out / "summary.json", to_json(summary));
  return summary;
}

}  // namespace statclaim
