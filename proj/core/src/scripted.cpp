#include "statclaim/scripted.hpp"

#include <sstream>

#include "statclaim/claimgen.hpp"
#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"
#include "statclaim/templates.hpp"
#include "statclaim/verifier.hpp"

namespace statclaim {

namespace {

std::string quote(const std::string& ident) {
  std::string out = "\"";
  for (char c : ident) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string literal(const std::string& value) {
  std::string out = "'";
  for (char c : value) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::string prompt_field(const std::string& prompt, const std::string& prefix) {
  std::istringstream in(prompt);
  std::string line, found;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) found = line.substr(prefix.size());
  }
  return found;
}

GoldOracleAdapter::GoldOracleAdapter(const TableStore& store) : store_(store) {}

std::string GoldOracleAdapter::gold_sql(const std::string& table_id, const std::string& subclaim) const {
  const SourceTable table = store_.table(table_id);
  const auto* area = table.first_with_role(ColumnRole::ReferenceArea);
  const auto* time = table.first_with_role(ColumnRole::TimePeriod);
  const auto* value = table.first_with_role(ColumnRole::ObservationValue);
  const auto* status = table.first_with_role(ColumnRole::ObservationStatus);
  if (!area || !time || !value) throw Error(ErrorCode::InvalidArgument, "table lacks area/time/value columns");

  std::string sql = "SELECT " + quote(area->name) + ", " + quote(time->name) + ", " + quote(value->name) + " FROM " +
                    quote(table_id) + " WHERE " + quote(value->name) + " IS NOT NULL";
  if (status) {
    sql += " AND (" + quote(status->name) + " IS NULL OR " + quote(status->name) + " = " +
           literal(store_.config().normal_status) + ")";
  }
  auto parsed = parse_template(subclaim);
  if (!parsed) return sql + " AND 0";

  // Find the measure combination whose label is the claim's measure phrase.
  const auto measures = table.measure_columns();
  if (!measures.empty()) {
    std::string cols;
    for (std::size_t i = 0; i < measures.size(); ++i) cols += (i ? ", " : "") + quote(measures[i]);
    const auto combos = store_.run_query("SELECT DISTINCT " + cols + " FROM " + quote(table_id));
    bool found = false;
    for (const auto& row : combos.rows) {
      std::string label;
      for (std::size_t i = 0; i < row.size(); ++i) label += (i ? ", " : "") + cell_to_string(row[i]);
      if (label != parsed->measure) continue;
      for (std::size_t i = 0; i < row.size(); ++i) {
        sql += " AND " + quote(measures[i]) +
               (std::holds_alternative<std::monostate>(row[i]) ? " IS NULL" : " = " + literal(cell_to_string(row[i])));
      }
      found = true;
      break;
    }
    if (!found) sql += " AND 0";
  } else if (parsed->measure != table_id) {
    sql += " AND 0";
  }

  switch (parsed->type) {
    case ClaimType::TopK:
      sql += " AND " + quote(time->name) + " = " + std::to_string(parsed->year);
      break;
    case ClaimType::ChangeInRank:
      sql += " AND " + quote(time->name) + " IN (" + std::to_string(parsed->year) + ", " +
             std::to_string(parsed->year_b) + ")";
      break;
    default:
      sql += " AND " + quote(area->name) + " = " + literal(parsed->country);
      break;
  }
  return sql + " ORDER BY " + quote(area->name) + ", " + quote(time->name);
}

std::string GoldOracleAdapter::complete(const ChatRequest& request) {
  const std::string& prompt = request.prompt();
  if (request.purpose == "decompose") return prompt_field(prompt, "Claim: ");
  if (request.purpose == "generate_sql") {
    std::string table = prompt_field(prompt, "Table name: ");
    if (table.size() >= 2 && table.front() == '"' && table.back() == '"') table = table.substr(1, table.size() - 2);
    return gold_sql(table, prompt_field(prompt, "Subclaim: "));
  }
  if (request.purpose == "verdict_subclaim") {
    const std::string subclaim = prompt_field(prompt, "Subclaim: ");
    const std::string sql = prompt_field(prompt, "Query: ");
    auto parsed = parse_template(subclaim);
    if (!parsed) return "NEI\nnot a recognizable claim";
    const auto result = store_.run_query(sql);
    // The query names exactly one table; find it to map columns.
    std::vector<EvidenceRow> rows;
    for (const auto& id : store_.table_ids()) {
      if (sql.find(" FROM " + quote(id) + " ") == std::string::npos) continue;
      rows = evidence_from_result(store_.table(id), result.columns, result.rows);
      break;
    }
    auto holds = claim_holds(*parsed, rows);
    if (!holds) return "NEI\nthe rows do not cover the claim";
    return *holds ? "True\nthe rows agree" : "False\nthe rows contradict the claim";
  }
  if (request.purpose == "synthesize") {
    std::vector<Verdict> verdicts;
    std::istringstream in(prompt);
    std::string line;
    bool in_list = false;
    while (std::getline(in, line)) {
      if (line.rfind("Subclaim verdicts:", 0) == 0) {
        in_list = true;
        continue;
      }
      if (!in_list) continue;
      const auto dot = line.find(". ");
      if (dot == std::string::npos) continue;
      const auto word = line.substr(dot + 2, line.find(' ', dot + 2) - dot - 2);
      if (auto v = parse_verdict(word)) verdicts.push_back(*v);
    }
    return verdicts.empty() ? "NEI" : std::string(to_string(synthesize_rule(verdicts)));
  }
  if (request.purpose == "judge_claim") return "NEI\nthe oracle does not judge generated claims";
  throw Error(ErrorCode::AdapterUnavailable, "oracle has no answer for " + request.purpose);
}

LossySqlAdapter::LossySqlAdapter(std::shared_ptr<ChatAdapter> inner, double failure_fraction, std::uint64_t seed)
    : inner_(std::move(inner)), fraction_(failure_fraction), seed_(seed) {}

bool LossySqlAdapter::fails(const std::string& subclaim) const {
  const auto h = derive_seed(seed_, "lossy|" + subclaim);
  return static_cast<double>(h >> 11) * 0x1.0p-53 < fraction_;
}

std::string LossySqlAdapter::complete(const ChatRequest& request) {
  if (request.purpose == "generate_sql" && fails(prompt_field(request.prompt(), "Subclaim: "))) {
    return "SELEC broken query";
  }
  return inner_->complete(request);
}

}  // namespace statclaim
