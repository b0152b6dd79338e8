#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "statclaim/chat_adapter.hpp"
#include "statclaim/claims.hpp"
#include "statclaim/extract.hpp"
#include "statclaim/prompts.hpp"
#include "statclaim/table_store.hpp"

namespace statclaim {

/// Reads a verdict from the first non-empty line: True, False or NEI,
/// case-insensitive, optional trailing period. Anything else is nullopt.
std::optional<Verdict> parse_verdict_line(const std::string& response);

/// Table name and description offered to prompts.
struct TableContext {
  std::string name;
  std::string description;
};
TableContext context_of(const SourceTable& table);

struct GeneratedText {
  std::string text;
  Generator generator = Generator::Template;
  std::string prompt_hash;
};

struct GenerateOptions {
  bool fallback_to_template = true;
};

/// Asks the adapter for one sentence. On adapter failure an English claim
/// falls back to the template when allowed; otherwise the error propagates.
GeneratedText generate_claim(const DataSample& sample, Language language, ChatAdapter& adapter,
                             const TableContext& table, const GenerateOptions& options = {},
                             const PromptLibrary& prompts = PromptLibrary::defaults());

ClaimRecord make_true_claim(const DataSample& sample, Language language, GeneratedText generated);

struct JudgeVerdict {
  Verdict verdict = Verdict::NEI;
  std::string justification;
  std::string judge_id;
};

class Judge {
 public:
  virtual ~Judge() = default;
  virtual JudgeVerdict judge(const ClaimRecord& claim, const DataSample& sample,
                             const TableContext& table) = 0;
};

/// Re-parses template text and checks it against the sample: the stated
/// fields must be the payload's and the claim must hold on the evidence.
/// Free text is NEI.
class RuleJudge : public Judge {
 public:
  JudgeVerdict judge(const ClaimRecord& claim, const DataSample& sample, const TableContext& table) override;
};

/// Prompts an adapter; re-asks once when the verdict token is missing and
/// then throws UnparseableVerdict.
JudgeVerdict judge_claim(const ClaimRecord& claim, const DataSample& sample, const TableContext& table,
                         ChatAdapter& adapter, const std::string& judge_id,
                         const PromptLibrary& prompts = PromptLibrary::defaults());

class AdapterJudge : public Judge {
 public:
  AdapterJudge(std::shared_ptr<ChatAdapter> adapter, std::string judge_id);
  JudgeVerdict judge(const ClaimRecord& claim, const DataSample& sample, const TableContext& table) override;

 private:
  std::shared_ptr<ChatAdapter> adapter_;
  std::string judge_id_;
};

/// True iff every verdict is True; throws InvalidArgument on an empty list.
bool keep_if_unanimous(const std::vector<JudgeVerdict>& verdicts);

struct CapConfig {
  int english = 100;
  int other = 20;
  int cap_for(Language language) const { return language == Language::En ? english : other; }
};

/// Uniform selection without replacement within each (table_id, claim_type)
/// group, at most caps.cap_for(language) per group. Independent of input
/// order; output sorted by sample_id.
std::vector<DataSample> apply_caps(const std::vector<DataSample>& samples, Language language,
                                   const CapConfig& caps, std::uint64_t seed);

struct ClaimGenConfig {
  std::vector<Language> languages{Language::En};
  CapConfig caps;
  GenerateOptions generate;
  unsigned threads = 1;
};

struct ClaimGenStats {
  std::size_t selected = 0;
  std::size_t generated = 0;
  std::size_t kept = 0;
  std::size_t dropped_by_judges = 0;
  std::size_t failed = 0;
};

/// Caps, generates and judges. With no adapter, English claims come from
/// templates and other languages are skipped. Output sorted by claim_id.
std::vector<ClaimRecord> generate_true_claims(const std::vector<DataSample>& samples,
                                              const std::map<std::string, TableContext>& tables,
                                              ChatAdapter* adapter, const std::vector<Judge*>& judges,
                                              const ClaimGenConfig& config, std::uint64_t seed,
                                              ClaimGenStats* stats = nullptr);

}  // namespace statclaim
