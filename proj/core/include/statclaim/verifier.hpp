#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statclaim/chat_adapter.hpp"
#include "statclaim/claims.hpp"
#include "statclaim/extract.hpp"
#include "statclaim/prompts.hpp"
#include "statclaim/retrieval.hpp"
#include "statclaim/table_store.hpp"

namespace statclaim {

struct Subclaim {
  std::string text;
  std::string parent_claim_id;
  int index = 0;
};

/// Splits a claim with the adapter; a null adapter passes the claim through
/// whole. Empty output is re-asked once; after that the claim passes through
/// when `fallback` is set, else AdapterUnavailable is thrown.
std::vector<Subclaim> decompose(const std::string& claim_text, const std::string& claim_id, ChatAdapter* adapter,
                                bool fallback = true, const PromptLibrary& prompts = PromptLibrary::defaults());

struct SqlAttempt {
  std::string sql;
  bool ok = false;
  std::string error;
  std::size_t row_count = 0;
};

/// What the SQL prompt shows about the chosen table.
struct SqlContext {
  std::string table_id;
  std::string schema;  // one "- NAME (role)" line per column
  std::string values;  // one "NAME: v1, v2, ..." line per categorical column
  std::string value_column;
};

/// Builds the prompt context; categorical values are capped with select_values.
/// The observation column is named but none of its values are shown.
SqlContext sql_context(const TableStore& store, const SourceTable& table, const std::string& subclaim,
                       std::size_t value_cap = 20);

/// Removes code fences and surrounding whitespace from a model's SQL reply.
std::string clean_sql(const std::string& response);

struct SqlOutcome {
  std::vector<SqlAttempt> attempts;
  std::optional<ResultSet> result;  // absent when every attempt failed
};

/// Prompts for SQL and runs it; each failure's message goes into the next
/// prompt. Stops at the first success or after max_attempts.
SqlOutcome generate_sql(const std::string& subclaim, const SqlContext& context, const TableStore& store,
                        ChatAdapter& adapter, int max_attempts = 3,
                        const PromptLibrary& prompts = PromptLibrary::defaults());

struct SubclaimVerdict {
  Verdict verdict = Verdict::NEI;
  std::string justification;
  bool unparseable = false;
};

SubclaimVerdict verdict_subclaim(const std::string& subclaim, const std::string& sql, const ResultSet& result,
                                 ChatAdapter& adapter, std::size_t max_rows_in_prompt = 50,
                                 const PromptLibrary& prompts = PromptLibrary::defaults());

/// Any False gives False; else any NEI gives NEI; else True.
Verdict synthesize_rule(const std::vector<Verdict>& verdicts);
/// Adapter synthesis; an unparseable reply falls back to the rule.
Verdict synthesize(const std::string& claim_text, const std::vector<SubclaimVerdict>& verdicts, ChatAdapter* adapter,
                   const PromptLibrary& prompts = PromptLibrary::defaults());

struct SubclaimTrace {
  int index = 0;
  std::string text;
  std::vector<RankedTable> ranking;
  std::string chosen_table;
  std::vector<SqlAttempt> attempts;
  std::vector<std::string> result_columns;
  std::vector<std::vector<Cell>> result_rows;
  /// (area, year, value) read from the result when it has those columns.
  std::vector<EvidenceRow> result_evidence;
  Verdict verdict = Verdict::NEI;
  std::string justification;
  bool unparseable_verdict = false;
  bool all_attempts_failed = false;
};

struct VerificationTrace {
  std::string claim_id;
  std::vector<SubclaimTrace> subclaims;
  Verdict final_verdict = Verdict::NEI;
  std::string synthesis;  // "rule" or "adapter"
};

nlohmann::json to_json(const VerificationTrace& trace);
VerificationTrace trace_from_json(const nlohmann::json& j);
void write_traces(const std::filesystem::path& path, std::vector<VerificationTrace> traces);
std::vector<VerificationTrace> read_traces(const std::filesystem::path& path);

/// Checks the attempt bound and that the final verdict follows from the
/// recorded subclaim verdicts (rule synthesis only).
std::vector<std::string> check_trace(const VerificationTrace& trace, int max_attempts = 3);

struct VerifierConfig {
  bool gold_tables = false;
  std::size_t top_n = 5;
  std::size_t value_cap = 20;
  std::size_t representation_values = 10;
  int max_attempts = 3;
  bool passthrough_decompose = false;
  bool decompose_fallback = true;
  bool adapter_synthesis = false;
  std::size_t max_rows_in_prompt = 50;
  unsigned threads = 1;
};

struct ClaimToVerify {
  std::string claim_id;
  std::string text;
  std::string gold_table;  // used only in gold-tables mode
};

/// retrieve -> decompose -> SQL (with retry) -> verdict -> synthesis. The
/// verifier never looks at claim types or labels.
class Verifier {
 public:
  Verifier(const TableStore& store, ChatAdapter& adapter, RetrievalScorer* scorer, VerifierConfig config = {},
           Reranker* reranker = nullptr, const PromptLibrary& prompts = PromptLibrary::defaults());

  VerificationTrace verify(const ClaimToVerify& claim);
  /// Concurrent over claims; output sorted by claim_id.
  std::vector<VerificationTrace> verify_all(const std::vector<ClaimToVerify>& claims);

  const std::vector<TableRepresentation>& corpus() const { return corpus_; }

 private:
  std::vector<RankedTable> rank(const std::string& subclaim);

  const TableStore& store_;
  ChatAdapter& adapter_;
  RetrievalScorer* scorer_;
  Reranker* reranker_;
  VerifierConfig config_;
  const PromptLibrary& prompts_;
  std::vector<TableRepresentation> corpus_;
  std::mutex scorer_mu_;
};

/// Area/year/value triples from a result whose columns include the table's
/// reference-area, time-period and observation columns (case-insensitive).
std::vector<EvidenceRow> evidence_from_result(const SourceTable& table, const std::vector<std::string>& columns,
                                              const std::vector<std::vector<Cell>>& rows);

}  // namespace statclaim
