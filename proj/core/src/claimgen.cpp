#include "statclaim/claimgen.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>

#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"
#include "statclaim/parallel.hpp"
#include "statclaim/random.hpp"
#include "statclaim/serialize.hpp"
#include "statclaim/templates.hpp"

namespace statclaim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string evidence_lines(const DataSample& sample) {
  std::ostringstream out;
  for (const auto& e : sample.evidence_rows) {
    out << e.country << ", " << e.year << ", " << format_value(e.value) << '\n';
  }
  return out.str();
}

/// First non-empty line of a model response.
std::string first_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) return line;
  }
  return {};
}

std::string rest_after_first_line(const std::string& text) {
  const auto first = first_line(text);
  const auto pos = text.find(first);
  return pos == std::string::npos ? std::string() : trim(text.substr(pos + first.size()));
}

}  // namespace

std::optional<Verdict> parse_verdict_line(const std::string& response) {
  std::string line = first_line(response);
  while (!line.empty() && (line.back() == '.' || line.back() == ':')) line.pop_back();
  std::string lower;
  for (char c : line) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "true") return Verdict::True;
  if (lower == "false") return Verdict::False;
  if (lower == "nei" || lower == "not enough information") return Verdict::NEI;
  return std::nullopt;
}

TableContext context_of(const SourceTable& table) { return {table.name, table.description}; }

GeneratedText generate_claim(const DataSample& sample, Language language, ChatAdapter& adapter,
                             const TableContext& table, const GenerateOptions& options,
                             const PromptLibrary& prompts) {
  const std::string prompt = prompts.render(
      "generate_claim", {{"table_name", table.name.empty() ? sample.table_id : table.name},
                         {"table_description", table.description},
                         {"measure", measure_phrase(sample)},
                         {"claim_type", std::string(to_string(sample.claim_type))},
                         {"payload", payload_to_json(sample.payload).dump()},
                         {"language", std::string(to_string(language))}});
  try {
    std::string text = trim(adapter.complete(make_request("generate_claim", prompt)));
    text = first_line(text);
    if (text.empty()) throw Error(ErrorCode::EmptyGeneration, "empty generation for " + sample.sample_id);
    return {text, Generator::Llm, prompts.hash("generate_claim")};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AdapterUnavailable && e.code() != ErrorCode::EmptyGeneration) throw;
    if (options.fallback_to_template && language == Language::En) {
      return {render_template(sample, language), Generator::Template, {}};
    }
    throw;
  }
}

ClaimRecord make_true_claim(const DataSample& sample, Language language, GeneratedText generated) {
  ClaimRecord c;
  c.claim_id = make_claim_id(sample.sample_id, language, generated.generator);
  c.language = language;
  c.text = std::move(generated.text);
  c.label = true;
  c.sample_id = sample.sample_id;
  c.claim_type = sample.claim_type;
  c.table_ids = {sample.table_id};
  c.generator = generated.generator;
  c.prompt_hash = std::move(generated.prompt_hash);
  return c;
}

JudgeVerdict RuleJudge::judge(const ClaimRecord& claim, const DataSample& sample, const TableContext&) {
  JudgeVerdict v{Verdict::NEI, {}, "rule"};
  auto parsed = parse_template(claim.text);
  if (!parsed) {
    v.justification = "text does not follow a known template";
    return v;
  }
  const auto expected = expected_fields(sample);
  if (parsed->type != expected.type || parsed->country != expected.country ||
      parsed->measure != expected.measure) {
    v.justification = "claim is about a different subject than the sample";
    return v;
  }
  auto holds = claim_holds(*parsed, sample.evidence_rows);
  if (!holds) {
    v.justification = "evidence does not cover the claim";
    return v;
  }
  v.verdict = *holds ? Verdict::True : Verdict::False;
  v.justification = *holds ? "evidence agrees" : "evidence contradicts the claim";
  return v;
}

JudgeVerdict judge_claim(const ClaimRecord& claim, const DataSample& sample, const TableContext& table,
                         ChatAdapter& adapter, const std::string& judge_id, const PromptLibrary& prompts) {
  const std::string prompt = prompts.render("judge_claim", {{"table_description", table.description},
                                                            {"measure", measure_phrase(sample)},
                                                            {"evidence", evidence_lines(sample)},
                                                            {"claim", claim.text}});
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string response = adapter.complete(make_request("judge_claim", prompt));
    if (auto v = parse_verdict_line(response)) return {*v, rest_after_first_line(response), judge_id};
  }
  throw Error(ErrorCode::UnparseableVerdict, "judge " + judge_id + " gave no verdict for " + claim.claim_id);
}

AdapterJudge::AdapterJudge(std::shared_ptr<ChatAdapter> adapter, std::string judge_id)
    : adapter_(std::move(adapter)), judge_id_(std::move(judge_id)) {}

JudgeVerdict AdapterJudge::judge(const ClaimRecord& claim, const DataSample& sample, const TableContext& table) {
  return judge_claim(claim, sample, table, *adapter_, judge_id_);
}

bool keep_if_unanimous(const std::vector<JudgeVerdict>& verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::InvalidArgument, "keep_if_unanimous needs at least one verdict");
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const JudgeVerdict& v) { return v.verdict == Verdict::True; });
}

std::vector<DataSample> apply_caps(const std::vector<DataSample>& samples, Language language,
                                   const CapConfig& caps, std::uint64_t seed) {
  const int cap = caps.cap_for(language);
  if (cap <= 0) throw Error(ErrorCode::InvalidArgument, "caps must be positive");
  std::map<std::pair<std::string, ClaimType>, std::vector<const DataSample*>> groups;
  for (const auto& s : samples) groups[{s.table_id, s.claim_type}].push_back(&s);

  std::vector<DataSample> out;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const DataSample* a, const DataSample* b) { return a->sample_id < b->sample_id; });
    group.erase(std::unique(group.begin(), group.end(),
                            [](const DataSample* a, const DataSample* b) { return a->sample_id == b->sample_id; }),
                group.end());
    if (static_cast<int>(group.size()) > cap) {
      Rng rng(derive_seed(seed, "caps|" + key.first + "|" + std::string(to_string(key.second)) + "|" +
                                    std::string(to_string(language))));
      rng.shuffle(group);
      group.resize(static_cast<std::size_t>(cap));
    }
    for (const auto* s : group) out.push_back(*s);
  }
  std::sort(out.begin(), out.end(),
            [](const DataSample& a, const DataSample& b) { return a.sample_id < b.sample_id; });
  return out;
}

std::vector<ClaimRecord> generate_true_claims(const std::vector<DataSample>& samples,
                                              const std::map<std::string, TableContext>& tables,
                                              ChatAdapter* adapter, const std::vector<Judge*>& judges,
                                              const ClaimGenConfig& config, std::uint64_t seed,
                                              ClaimGenStats* stats) {
  std::vector<ClaimRecord> out;
  ClaimGenStats local;
  std::mutex mu;
  for (Language language : config.languages) {
    if (!adapter && language != Language::En) continue;
    const auto selected = apply_caps(samples, language, config.caps, seed);
    local.selected += selected.size();
    std::vector<std::optional<ClaimRecord>> results(selected.size());
    parallel_for(selected.size(), config.threads, [&](std::size_t i) {
      const auto& sample = selected[i];
      TableContext table;
      if (auto it = tables.find(sample.table_id); it != tables.end()) table = it->second;
      GeneratedText text;
      try {
        text = adapter ? generate_claim(sample, language, *adapter, table, config.generate)
                       : GeneratedText{render_template(sample, language), Generator::Template, {}};
      } catch (const Error&) {
        std::lock_guard lock(mu);
        ++local.failed;
        return;
      }
      auto claim = make_true_claim(sample, language, std::move(text));
      std::vector<JudgeVerdict> verdicts;
      for (Judge* j : judges) {
        try {
          verdicts.push_back(j->judge(claim, sample, table));
        } catch (const Error& e) {
          verdicts.push_back({Verdict::NEI, e.what(), "error"});
        }
      }
      std::lock_guard lock(mu);
      ++local.generated;
      if (verdicts.empty() || keep_if_unanimous(verdicts)) {
        results[i] = std::move(claim);
      } else {
        ++local.dropped_by_judges;
      }
    });
    for (auto& r : results) {
      if (r) out.push_back(std::move(*r));
    }
  }
  local.kept = out.size();
  std::sort(out.begin(), out.end(), [](const ClaimRecord& a, const ClaimRecord& b) { return a.claim_id < b.claim_id; });
  if (stats) *stats = local;
  return out;
}

}  // namespace statclaim
