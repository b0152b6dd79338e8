#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statclaim/claimgen.hpp"
#include "statclaim/extract.hpp"
#include "statclaim/fixture.hpp"
#include "statclaim/partition.hpp"
#include "statclaim/perturb.hpp"
#include "statclaim/preprocess.hpp"
#include "statclaim/table_store.hpp"
#include "statclaim/verifier.hpp"

namespace statclaim {

struct VerifyStageConfig {
  /// "oracle": the scripted gold oracle; "http": a chat-completion endpoint.
  std::string backend = "oracle";
  std::string adapter_url;
  std::string model;
  /// "lexical" or "http".
  std::string scorer = "lexical";
  std::string scorer_url;
  bool rerank = false;
  /// Share of subclaims whose SQL generation is forced to fail.
  double lossy_fraction = 0.0;
  /// "test" verifies the held-out split, "all" every claim.
  std::string claims = "test";
  std::size_t max_claims = 0;  // 0 = no limit
  VerifierConfig verifier;
};

struct PipelineConfig {
  std::filesystem::path out_dir;
  /// Corpus manifest; when empty a fixture is generated into out_dir/fixture.
  std::filesystem::path corpus;
  FixtureConfig fixture;
  std::optional<std::uint64_t> seed;
  WindowConfig window;
  ExtractConfig extract;
  ClaimGenConfig claimgen;
  /// "template" (no adapter) or "http".
  std::string generator = "template";
  std::string generator_url;
  PerturbConfig perturb;
  SplitOptions split;
  VerifyStageConfig verify;
  unsigned threads = 1;
};

/// Reads every documented key; unknown keys are an error. Missing keys keep
/// their defaults.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& config);
/// Throws InvalidArgument for out-of-range thresholds or a missing seed.
void validate(const PipelineConfig& config);

/// Named sub-seed of the root seed for one stage.
std::uint64_t stage_seed(const PipelineConfig& config, const std::string& stage);

struct StageSummary {
  std::string name;
  std::map<std::string, std::int64_t> counts;
  std::map<std::string, std::string> outputs;  // file name -> sha256
};

struct RunSummary {
  std::vector<StageSummary> stages;
};
nlohmann::json to_json(const RunSummary& summary);

/// Extraction over every prepared (table, combination) slice, merged into
/// one sorted batch.
ExtractionBatch extract_corpus(const PreprocessResult& prepared, const ExtractConfig& config = {}, unsigned threads = 1);

/// Name and description of every stored table.
std::map<std::string, TableContext> table_contexts(const TableStore& store);

/// Cleaned rows of every (table, combination), all years, keyed by
/// table_id + "|" + combination label.
std::map<std::string, std::vector<EvidenceRow>> measure_rows(const PreprocessResult& prepared);

/// The verifier backend described by the config (owning its dependencies).
std::shared_ptr<ChatAdapter> make_verifier_adapter(const VerifyStageConfig& config, const TableStore& store,
                                                   std::uint64_t seed);
std::unique_ptr<RetrievalScorer> make_scorer(const VerifyStageConfig& config);
std::unique_ptr<Reranker> make_reranker(const VerifyStageConfig& config);

/// Runs ingest -> preprocess -> extract -> generate -> perturb -> split ->
/// verify -> evaluate, writing artifacts and summary.json into out_dir.
/// A stage failure is rethrown with the stage name in its message.
RunSummary run_pipeline(const PipelineConfig& config);

}  // namespace statclaim
