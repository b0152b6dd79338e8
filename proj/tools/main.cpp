// statclaim: command line entry point for the claim benchmark pipeline.
#include <cstdio>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "statclaim/corpus.hpp"
#include "statclaim/error.hpp"
#include "statclaim/eval.hpp"
#include "statclaim/pipeline.hpp"
#include "statclaim/serialize.hpp"

using namespace statclaim;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

PipelineConfig load_config(const Common& common) {
  PipelineConfig c;
  if (!common.config.empty()) c = pipeline_config_from_json(read_json(common.config));
  if (common.seed) c.seed = *common.seed;
  if (common.threads) c.threads = *common.threads;
  return c;
}

std::uint64_t required_seed(const PipelineConfig& c, const std::string& stage) {
  if (!c.seed) throw Error(ErrorCode::InvalidArgument, stage + " needs --seed or a config seed");
  return stage_seed(c, stage);
}

/// A store file when --db names one that already holds tables, otherwise
/// the corpus ingested in memory (and into --db when given).
TableStore open_store(const std::string& corpus, const std::string& db) {
  TableStore store(db.empty() ? ":memory:" : db);
  if (!store.table_ids().empty()) return store;
  if (corpus.empty()) throw Error(ErrorCode::InvalidArgument, "--corpus is required");
  ingest_corpus(store, load_corpus_manifest(corpus));
  return store;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical claim benchmark: corpus ingestion, claim generation and verification"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "Root seed");
  app.add_option("--threads", common.threads, "Worker threads");

  // fixture
  auto* fixture = app.add_subcommand("fixture", "Write a synthetic corpus with oracle counts");
  std::string fixture_out;
  std::optional<int> fx_tables, fx_countries, fx_years, fx_start;
  std::optional<std::uint64_t> fx_seed;
  fixture->add_option("--out", fixture_out, "Output directory")->required();
  fixture->add_option("--tables", fx_tables)->check(CLI::PositiveNumber);
  fixture->add_option("--countries", fx_countries)->check(CLI::PositiveNumber);
  fixture->add_option("--years", fx_years)->check(CLI::PositiveNumber);
  fixture->add_option("--start-year", fx_start);
  fixture->add_option("--fixture-seed", fx_seed, "Fixture seed (defaults to the config's)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a corpus manifest into a SQLite store file");
  std::string corpus, db;
  ingest->add_option("--corpus", corpus, "Corpus manifest")->required()->check(CLI::ExistingFile);
  ingest->add_option("--db", db, "Store file")->required();

  // preprocess
  auto* preprocess = app.add_subcommand("preprocess", "Clean and window every table");
  std::string out;
  preprocess->add_option("--corpus", corpus)->check(CLI::ExistingFile);
  preprocess->add_option("--db", db);
  preprocess->add_option("--out", out, "Report file")->required();

  // extract
  auto* extract = app.add_subcommand("extract", "Extract data samples from every slice");
  extract->add_option("--corpus", corpus)->check(CLI::ExistingFile);
  extract->add_option("--db", db);
  extract->add_option("--out", out, "Samples file (jsonl)")->required();

  // generate
  auto* generate = app.add_subcommand("generate", "Render and judge true claims");
  std::string samples_path, generator_url;
  std::vector<std::string> languages;
  generate->add_option("--samples", samples_path)->required()->check(CLI::ExistingFile);
  generate->add_option("--corpus", corpus)->check(CLI::ExistingFile);
  generate->add_option("--db", db);
  generate->add_option("--adapter-url", generator_url, "Chat endpoint; template rendering when absent");
  generate->add_option("--languages", languages);
  generate->add_option("--out", out, "Claims file (jsonl)")->required();

  // perturb
  auto* perturb = app.add_subcommand("perturb", "Add one false claim per true claim");
  std::string claims_path;
  perturb->add_option("--claims", claims_path)->required()->check(CLI::ExistingFile);
  perturb->add_option("--samples", samples_path)->required()->check(CLI::ExistingFile);
  perturb->add_option("--corpus", corpus)->check(CLI::ExistingFile);
  perturb->add_option("--db", db);
  perturb->add_option("--out", out)->required();

  // split
  auto* split_cmd = app.add_subcommand("split", "Hold out tables for the test split");
  std::optional<double> holdout;
  std::optional<std::size_t> test_cap;
  split_cmd->add_option("--claims", claims_path)->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--holdout", holdout)->check(CLI::Range(0.0, 1.0));
  split_cmd->add_option("--test-cap", test_cap);
  split_cmd->add_option("--out", out, "Split manifest")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "Verify claims against the corpus");
  bool gold_tables = false;
  std::optional<std::string> scorer, adapter_url, scorer_url, model, backend;
  std::optional<double> lossy;
  std::optional<std::size_t> max_claims;
  std::string split_path;
  verify->add_option("--claims", claims_path)->required()->check(CLI::ExistingFile);
  verify->add_option("--corpus", corpus)->check(CLI::ExistingFile);
  verify->add_option("--db", db);
  verify->add_flag("--gold-tables", gold_tables, "Skip retrieval and use each claim's source table");
  verify->add_option("--scorer", scorer)->check(CLI::IsMember({"lexical", "http"}));
  verify->add_option("--scorer-url", scorer_url);
  verify->add_option("--backend", backend)->check(CLI::IsMember({"oracle", "http"}));
  verify->add_option("--adapter-url", adapter_url, "Chat endpoint; implies --backend http");
  verify->add_option("--model", model);
  verify->add_option("--lossy", lossy, "Share of subclaims whose SQL generation fails")->check(CLI::Range(0.0, 1.0));
  verify->add_option("--split", split_path, "Verify only the test claims of this split")->check(CLI::ExistingFile);
  verify->add_option("--max-claims", max_claims);
  verify->add_option("--out", out, "Trace file (jsonl)")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score traces against gold labels");
  std::vector<std::string> traces_paths;
  std::string report_path;
  evaluate->add_option("--traces", traces_paths, "One trace file per run")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--gold", claims_path, "Claims file with labels")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--samples", samples_path, "Samples file, for data retrieval accuracy")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--report", report_path)->required();

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage and write a run summary");
  std::string pipeline_out;
  pipeline->add_option("--corpus", corpus, "Corpus manifest; a fixture is generated when absent")
      ->check(CLI::ExistingFile);
  pipeline->add_option("--out", pipeline_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = load_config(common);

    if (*fixture) {
      if (fx_tables) config.fixture.n_tables = *fx_tables;
      if (fx_countries) config.fixture.n_countries = *fx_countries;
      if (fx_years) config.fixture.n_years = *fx_years;
      if (fx_start) config.fixture.start_year = *fx_start;
      if (fx_seed) config.fixture.seed = *fx_seed;
      const auto r = generate_fixture(config.fixture, fixture_out);
      print({{"corpus", r.corpus_manifest.generic_string()},
             {"expected", r.expected_manifest.generic_string()},
             {"totals", r.totals},
             {"sub_threshold", r.sub_threshold}});
    } else if (*ingest) {
      TableStore store(db);
      const auto tables = ingest_corpus(store, load_corpus_manifest(corpus), true);
      json j = json::array();
      for (const auto& t : tables) j.push_back({{"table_id", t.table_id}, {"rows", t.row_count}});
      print(j);
    } else if (*preprocess) {
      const auto store = open_store(corpus, db);
      const auto p = preprocess_corpus(store, config.window);
      json reports = json::array();
      for (const auto& r : p.reports) reports.push_back(to_json(r));
      write_json(out, reports);
    } else if (*extract) {
      const auto store = open_store(corpus, db);
      const auto batch = extract_corpus(preprocess_corpus(store, config.window), config.extract, config.threads);
      write_samples(out, batch.samples);
      std::cout << batch.samples.size() << " samples\n";
    } else if (*generate) {
      if (!languages.empty()) {
        config.claimgen.languages.clear();
        for (const auto& l : languages) {
          auto lang = parse_language(l);
          if (!lang) throw Error(ErrorCode::InvalidArgument, "unknown language " + l);
          config.claimgen.languages.push_back(*lang);
        }
      }
      std::map<std::string, TableContext> contexts;
      if (!corpus.empty() || !db.empty()) contexts = table_contexts(open_store(corpus, db));
      std::shared_ptr<ChatAdapter> adapter;
      if (!generator_url.empty()) {
        auto http = HttpAdapterConfig::from_env();
        http.base_url = generator_url;
        adapter = std::make_shared<CachingAdapter>(std::make_shared<HttpChatAdapter>(http));
      }
      RuleJudge rule;
      auto cfg = config.claimgen;
      cfg.threads = config.threads;
      ClaimGenStats stats;
      const auto claims = generate_true_claims(read_samples(samples_path), contexts, adapter.get(), {&rule}, cfg,
                                               required_seed(config, "generate"), &stats);
      write_claims(out, claims);
      print({{"selected", stats.selected},
             {"generated", stats.generated},
             {"kept", stats.kept},
             {"dropped_by_judges", stats.dropped_by_judges},
             {"failed", stats.failed}});
    } else if (*perturb) {
      const auto seed = required_seed(config, "perturb");
      const auto samples = read_samples(samples_path);
      std::map<std::string, const DataSample*> by_id;
      for (const auto& s : samples) by_id[s.sample_id] = &s;
      std::map<std::string, std::vector<EvidenceRow>> rows;
      if (!corpus.empty() || !db.empty()) rows = measure_rows(preprocess_corpus(open_store(corpus, db), config.window));
      std::vector<ClaimRecord> true_claims;
      for (auto& c : read_claims(claims_path)) {
        if (c.label) true_claims.push_back(std::move(c));
      }
      PerturbStats stats;
      const auto all = add_false_claims(true_claims, by_id, seed, config.perturb, &stats, rows.empty() ? nullptr : &rows);
      write_claims(out, all);
      print({{"true", true_claims.size()},
             {"false", stats.perturbed},
             {"unrecoverable", stats.unrecoverable},
             {"no_contradiction", stats.no_contradiction},
             {"by_family", stats.by_family}});
    } else if (*split_cmd) {
      if (holdout) config.split.holdout_fraction = *holdout;
      if (test_cap) config.split.test_cap = *test_cap;
      const auto m = split(read_claims(claims_path), required_seed(config, "split"), config.split);
      write_json(out, to_json(m));
      print({{"holdout_tables", m.holdout_tables},
             {"train", m.train_claim_ids.size()},
             {"test", m.test_claim_ids.size()},
             {"discarded", m.discarded_claim_ids.size()}});
    } else if (*verify) {
      auto& v = config.verify;
      if (gold_tables) v.verifier.gold_tables = true;
      if (scorer) v.scorer = *scorer;
      if (scorer_url) v.scorer_url = *scorer_url;
      if (adapter_url) {
        v.adapter_url = *adapter_url;
        v.backend = "http";
      }
      if (backend) v.backend = *backend;
      if (model) v.model = *model;
      if (lossy) v.lossy_fraction = *lossy;
      if (max_claims) v.max_claims = *max_claims;
      if (v.backend == "http" && v.adapter_url.empty()) {
        throw Error(ErrorCode::InvalidArgument, "--backend http needs --adapter-url");
      }
      std::optional<std::set<std::string>> wanted;
      if (!split_path.empty()) {
        const auto m = split_from_json(read_json(split_path));
        wanted.emplace(m.test_claim_ids.begin(), m.test_claim_ids.end());
      }
      std::vector<ClaimToVerify> inputs;
      for (const auto& c : read_claims(claims_path)) {
        if (wanted && !wanted->count(c.claim_id)) continue;
        inputs.push_back({c.claim_id, c.text, c.table_ids.empty() ? std::string() : c.table_ids.front()});
      }
      if (v.max_claims && inputs.size() > v.max_claims) inputs.resize(v.max_claims);
      const auto store = open_store(corpus, db);
      auto adapter = make_verifier_adapter(v, store, config.seed ? stage_seed(config, "lossy") : 0);
      auto scorer_impl = make_scorer(v);
      auto reranker = make_reranker(v);
      auto vcfg = v.verifier;
      vcfg.threads = config.threads;
      Verifier verifier(store, *adapter, scorer_impl.get(), vcfg, reranker.get());
      const auto traces = verifier.verify_all(inputs);
      write_traces(out, traces);
      std::cout << traces.size() << " traces\n";
    } else if (*evaluate) {
      std::vector<std::vector<VerificationTrace>> runs;
      for (const auto& p : traces_paths) runs.push_back(read_traces(p));
      std::vector<DataSample> samples;
      if (!samples_path.empty()) samples = read_samples(samples_path);
      const auto report = evaluation_report(runs, read_claims(claims_path), samples);
      write_json(report_path, report);
      print(report.at("verdict_accuracy"));
    } else if (*pipeline) {
      if (!corpus.empty()) config.corpus = corpus;
      if (!pipeline_out.empty()) config.out_dir = pipeline_out;
      const auto summary = run_pipeline(config);
      print(to_json(summary));
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
