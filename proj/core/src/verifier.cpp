#include "statclaim/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "statclaim/claimgen.hpp"
#include "statclaim/error.hpp"
#include "statclaim/parallel.hpp"
#include "statclaim/serialize.hpp"

namespace statclaim {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Drops list markers such as "- ", "* ", "1. " and "2) ".
std::string strip_marker(std::string line) {
  line = trim(line);
  if (line.rfind("- ", 0) == 0 || line.rfind("* ", 0) == 0) return trim(line.substr(2));
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') && line[i + 1] == ' ') {
    return trim(line.substr(i + 2));
  }
  return line;
}

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return v;
        }
      },
      c);
}

Cell cell_from(const json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  return j.get<std::string>();
}

std::optional<double> cell_number(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* s = std::get_if<std::string>(&c)) {
    try {
      std::size_t used = 0;
      double v = std::stod(*s, &used);
      if (used == s->size()) return v;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

std::string rows_text(const ResultSet& result, std::size_t max_rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < result.columns.size(); ++i) out << (i ? " | " : "") << result.columns[i];
  out << '\n';
  for (std::size_t r = 0; r < result.rows.size() && r < max_rows; ++r) {
    for (std::size_t i = 0; i < result.rows[r].size(); ++i) {
      out << (i ? " | " : "") << cell_to_string(result.rows[r][i]);
    }
    out << '\n';
  }
  if (result.rows.size() > max_rows) out << "... " << result.rows.size() - max_rows << " more rows\n";
  return out.str();
}

std::string one_line(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !out.empty()) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<Subclaim> decompose(const std::string& claim_text, const std::string& claim_id, ChatAdapter* adapter,
                                bool fallback, const PromptLibrary& prompts) {
  auto whole = [&] { return std::vector<Subclaim>{{claim_text, claim_id, 0}}; };
  if (!adapter) return whole();
  const std::string prompt = prompts.render("decompose", {{"claim", claim_text}});
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string response;
    try {
      response = adapter->complete(make_request("decompose", prompt));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AdapterUnavailable) throw;
      break;
    }
    std::vector<Subclaim> out;
    std::istringstream in(response);
    std::string line;
    while (std::getline(in, line)) {
      line = strip_marker(line);
      if (line.empty() || lower(line).rfind("subclaims", 0) == 0) continue;
      out.push_back({line, claim_id, static_cast<int>(out.size())});
    }
    if (!out.empty()) return out;
  }
  if (fallback) return whole();
  throw Error(ErrorCode::AdapterUnavailable, "decomposition produced no subclaims for " + claim_id);
}

SqlContext sql_context(const TableStore& store, const SourceTable& table, const std::string& subclaim,
                       std::size_t value_cap) {
  SqlContext ctx;
  ctx.table_id = table.table_id;
  std::ostringstream schema, values;
  for (const auto& c : table.columns) {
    schema << "- " << c.name << " (" << to_string(c.role) << ")\n";
    if (c.role == ColumnRole::ObservationValue) {
      ctx.value_column = c.name;
      continue;
    }
    if (c.kind != ValueKind::Categorical) continue;
    if (c.role == ColumnRole::Metadata || c.role == ColumnRole::MeasureIdentifier) continue;
    const auto uniques = store.unique_values(table.table_id, c.name).values;
    const auto chosen = select_values(subclaim, uniques, value_cap);
    values << c.name << ": ";
    for (std::size_t i = 0; i < chosen.size(); ++i) values << (i ? ", " : "") << chosen[i];
    values << '\n';
  }
  ctx.schema = schema.str();
  ctx.values = values.str();
  return ctx;
}

std::string clean_sql(const std::string& response) {
  std::string s = trim(response);
  if (s.rfind("```", 0) == 0) {
    const auto nl = s.find('\n');
    s = nl == std::string::npos ? std::string() : s.substr(nl + 1);
    const auto fence = s.find("```");
    if (fence != std::string::npos) s = s.substr(0, fence);
  }
  return trim(s);
}

SqlOutcome generate_sql(const std::string& subclaim, const SqlContext& context, const TableStore& store,
                        ChatAdapter& adapter, int max_attempts, const PromptLibrary& prompts) {
  SqlOutcome out;
  std::string feedback;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::string prompt = prompts.render("generate_sql", {{"dialect", std::string(TableStore::dialect())},
                                                               {"table_id", context.table_id},
                                                               {"schema", context.schema},
                                                               {"values", context.values},
                                                               {"value_column", context.value_column},
                                                               {"feedback", feedback},
                                                               {"subclaim", subclaim}});
    SqlAttempt a;
    try {
      a.sql = clean_sql(adapter.complete(make_request("generate_sql", prompt)));
      auto result = store.run_query(a.sql);
      a.ok = true;
      a.row_count = result.rows.size();
      out.attempts.push_back(a);
      out.result = std::move(result);
      return out;
    } catch (const Error& e) {
      a.error = e.what();
    }
    out.attempts.push_back(a);
    feedback += "A previous query failed.\nQuery: " + one_line(a.sql) + "\nError: " + a.error + "\n";
  }
  return out;
}

SubclaimVerdict verdict_subclaim(const std::string& subclaim, const std::string& sql, const ResultSet& result,
                                 ChatAdapter& adapter, std::size_t max_rows_in_prompt, const PromptLibrary& prompts) {
  const std::string prompt = prompts.render("verdict_subclaim", {{"subclaim", subclaim},
                                                                 {"sql", one_line(sql)},
                                                                 {"row_count", std::to_string(result.rows.size())},
                                                                 {"rows", rows_text(result, max_rows_in_prompt)}});
  const std::string response = adapter.complete(make_request("verdict_subclaim", prompt));
  SubclaimVerdict v;
  if (auto parsed = parse_verdict_line(response)) {
    v.verdict = *parsed;
    const auto nl = response.find('\n');
    v.justification = nl == std::string::npos ? std::string() : trim(response.substr(nl + 1));
  } else {
    v.unparseable = true;
    v.justification = trim(response);
  }
  return v;
}

Verdict synthesize_rule(const std::vector<Verdict>& verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::InvalidArgument, "synthesis needs at least one verdict");
  if (std::find(verdicts.begin(), verdicts.end(), Verdict::False) != verdicts.end()) return Verdict::False;
  if (std::find(verdicts.begin(), verdicts.end(), Verdict::NEI) != verdicts.end()) return Verdict::NEI;
  return Verdict::True;
}

Verdict synthesize(const std::string& claim_text, const std::vector<SubclaimVerdict>& verdicts, ChatAdapter* adapter,
                   const PromptLibrary& prompts) {
  std::vector<Verdict> plain;
  for (const auto& v : verdicts) plain.push_back(v.verdict);
  const Verdict rule = synthesize_rule(plain);
  if (!adapter) return rule;
  std::ostringstream lines;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    lines << i + 1 << ". " << to_string(verdicts[i].verdict);
    if (!verdicts[i].justification.empty()) lines << " - " << one_line(verdicts[i].justification);
    lines << '\n';
  }
  try {
    const auto response = adapter->complete(
        make_request("synthesize", prompts.render("synthesize", {{"claim", claim_text}, {"verdicts", lines.str()}})));
    if (auto v = parse_verdict_line(response)) return *v;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AdapterUnavailable) throw;
  }
  return rule;
}

std::vector<EvidenceRow> evidence_from_result(const SourceTable& table, const std::vector<std::string>& columns,
                                              const std::vector<std::vector<Cell>>& rows) {
  auto column_of = [&](ColumnRole role) -> int {
    const auto* spec = table.first_with_role(role);
    if (!spec) return -1;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (lower(columns[i]) == lower(spec->name)) return static_cast<int>(i);
    }
    return -1;
  };
  const int area = column_of(ColumnRole::ReferenceArea);
  const int time = column_of(ColumnRole::TimePeriod);
  const int value = column_of(ColumnRole::ObservationValue);
  std::vector<EvidenceRow> out;
  if (area < 0 || time < 0 || value < 0) return out;
  for (const auto& row : rows) {
    const auto* country = std::get_if<std::string>(&row[static_cast<std::size_t>(area)]);
    const auto year = cell_number(row[static_cast<std::size_t>(time)]);
    const auto v = cell_number(row[static_cast<std::size_t>(value)]);
    if (!country || !year || !v) continue;
    out.push_back({*country, static_cast<int>(*year), *v});
  }
  return out;
}

json to_json(const VerificationTrace& trace) {
  json subs = json::array();
  for (const auto& s : trace.subclaims) {
    json ranking = json::array();
    for (const auto& r : s.ranking) ranking.push_back({{"table_id", r.table_id}, {"score", r.score}});
    json attempts = json::array();
    for (const auto& a : s.attempts) {
      attempts.push_back({{"sql", a.sql}, {"ok", a.ok}, {"error", a.error}, {"row_count", a.row_count}});
    }
    json rows = json::array();
    for (const auto& row : s.result_rows) {
      json r = json::array();
      for (const auto& c : row) r.push_back(cell_json(c));
      rows.push_back(std::move(r));
    }
    json evidence = json::array();
    for (const auto& e : s.result_evidence) evidence.push_back(json::array({e.country, e.year, e.value}));
    subs.push_back({{"index", s.index},
                    {"text", s.text},
                    {"ranking", ranking},
                    {"chosen_table", s.chosen_table},
                    {"sql_attempts", attempts},
                    {"result_columns", s.result_columns},
                    {"result_rows", rows},
                    {"result_evidence", evidence},
                    {"verdict", to_string(s.verdict)},
                    {"justification", s.justification},
                    {"unparseable_verdict", s.unparseable_verdict},
                    {"all_attempts_failed", s.all_attempts_failed}});
  }
  return {{"claim_id", trace.claim_id},
          {"subclaims", subs},
          {"final_verdict", to_string(trace.final_verdict)},
          {"synthesis", trace.synthesis}};
}

VerificationTrace trace_from_json(const json& j) {
  VerificationTrace t;
  t.claim_id = j.at("claim_id").get<std::string>();
  auto fv = parse_verdict(j.at("final_verdict").get<std::string>());
  if (!fv) throw Error(ErrorCode::Parse, "bad final verdict in trace " + t.claim_id);
  t.final_verdict = *fv;
  t.synthesis = j.value("synthesis", "rule");
  for (const auto& s : j.at("subclaims")) {
    SubclaimTrace st;
    st.index = s.at("index").get<int>();
    st.text = s.at("text").get<std::string>();
    for (const auto& r : s.at("ranking")) st.ranking.push_back({r.at("table_id"), r.at("score")});
    st.chosen_table = s.at("chosen_table").get<std::string>();
    for (const auto& a : s.at("sql_attempts")) {
      st.attempts.push_back({a.at("sql"), a.at("ok"), a.at("error"), a.at("row_count")});
    }
    st.result_columns = s.at("result_columns").get<std::vector<std::string>>();
    for (const auto& row : s.at("result_rows")) {
      std::vector<Cell> cells;
      for (const auto& c : row) cells.push_back(cell_from(c));
      st.result_rows.push_back(std::move(cells));
    }
    for (const auto& e : s.at("result_evidence")) {
      st.result_evidence.push_back({e.at(0).get<std::string>(), e.at(1).get<int>(), e.at(2).get<double>()});
    }
    auto v = parse_verdict(s.at("verdict").get<std::string>());
    if (!v) throw Error(ErrorCode::Parse, "bad subclaim verdict in trace " + t.claim_id);
    st.verdict = *v;
    st.justification = s.value("justification", "");
    st.unparseable_verdict = s.value("unparseable_verdict", false);
    st.all_attempts_failed = s.value("all_attempts_failed", false);
    t.subclaims.push_back(std::move(st));
  }
  return t;
}

void write_traces(const std::filesystem::path& path, std::vector<VerificationTrace> traces) {
  std::sort(traces.begin(), traces.end(),
            [](const VerificationTrace& a, const VerificationTrace& b) { return a.claim_id < b.claim_id; });
  std::vector<json> rows;
  for (const auto& t : traces) rows.push_back(to_json(t));
  write_jsonl(path, rows);
}

std::vector<VerificationTrace> read_traces(const std::filesystem::path& path) {
  std::vector<VerificationTrace> out;
  for (const auto& j : read_jsonl(path)) out.push_back(trace_from_json(j));
  return out;
}

std::vector<std::string> check_trace(const VerificationTrace& trace, int max_attempts) {
  std::vector<std::string> v;
  if (trace.subclaims.empty()) v.push_back("no subclaims");
  std::vector<Verdict> verdicts;
  for (const auto& s : trace.subclaims) {
    if (static_cast<int>(s.attempts.size()) > max_attempts) v.push_back("too many SQL attempts");
    verdicts.push_back(s.verdict);
  }
  if (!verdicts.empty() && trace.synthesis == "rule" && synthesize_rule(verdicts) != trace.final_verdict) {
    v.push_back("final verdict does not follow from subclaim verdicts");
  }
  return v;
}

Verifier::Verifier(const TableStore& store, ChatAdapter& adapter, RetrievalScorer* scorer, VerifierConfig config,
                   Reranker* reranker, const PromptLibrary& prompts)
    : store_(store), adapter_(adapter), scorer_(scorer), reranker_(reranker), config_(config), prompts_(prompts) {
  if (!config_.gold_tables) {
    if (!scorer_) throw Error(ErrorCode::ScorerUnavailable, "retrieval needs a scorer");
    corpus_ = build_representations(store_, config_.representation_values);
  }
}

std::vector<RankedTable> Verifier::rank(const std::string& subclaim) {
  std::lock_guard lock(scorer_mu_);
  return retrieve_table(subclaim, corpus_, *scorer_, config_.top_n, reranker_);
}

VerificationTrace Verifier::verify(const ClaimToVerify& claim) {
  VerificationTrace trace;
  trace.claim_id = claim.claim_id;
  trace.synthesis = config_.adapter_synthesis ? "adapter" : "rule";
  const auto subclaims = decompose(claim.text, claim.claim_id, config_.passthrough_decompose ? nullptr : &adapter_,
                                   config_.decompose_fallback, prompts_);
  std::vector<SubclaimVerdict> verdicts;
  for (const auto& sub : subclaims) {
    SubclaimTrace st;
    st.index = sub.index;
    st.text = sub.text;
    if (config_.gold_tables) {
      st.ranking = {{claim.gold_table, 1.0}};
    } else {
      st.ranking = rank(sub.text);
    }
    st.chosen_table = st.ranking.front().table_id;
    SubclaimVerdict verdict;
    if (!store_.has_table(st.chosen_table)) {
      verdict.justification = "unknown table " + st.chosen_table;
    } else {
      const SourceTable table = store_.table(st.chosen_table);
      const auto ctx = sql_context(store_, table, sub.text, config_.value_cap);
      auto outcome = generate_sql(sub.text, ctx, store_, adapter_, config_.max_attempts, prompts_);
      st.attempts = outcome.attempts;
      if (!outcome.result) {
        st.all_attempts_failed = true;
        verdict.justification = std::string(to_string(ErrorCode::AllAttemptsFailed));
      } else {
        st.result_columns = outcome.result->columns;
        st.result_rows = outcome.result->rows;
        st.result_evidence = evidence_from_result(table, st.result_columns, st.result_rows);
        verdict = verdict_subclaim(sub.text, st.attempts.back().sql, *outcome.result, adapter_,
                                   config_.max_rows_in_prompt, prompts_);
      }
    }
    st.verdict = verdict.verdict;
    st.justification = verdict.justification;
    st.unparseable_verdict = verdict.unparseable;
    verdicts.push_back(verdict);
    trace.subclaims.push_back(std::move(st));
  }
  trace.final_verdict = synthesize(claim.text, verdicts, config_.adapter_synthesis ? &adapter_ : nullptr, prompts_);
  return trace;
}

std::vector<VerificationTrace> Verifier::verify_all(const std::vector<ClaimToVerify>& claims) {
  std::vector<VerificationTrace> out(claims.size());
  parallel_for(claims.size(), config_.threads, [&](std::size_t i) { out[i] = verify(claims[i]); });
  std::sort(out.begin(), out.end(),
            [](const VerificationTrace& a, const VerificationTrace& b) { return a.claim_id < b.claim_id; });
  return out;
}

}  // namespace statclaim
