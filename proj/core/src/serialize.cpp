#include "statclaim/serialize.hpp"

#include <algorithm>
#include <fstream>

#include "statclaim/error.hpp"

namespace statclaim {

using nlohmann::json;

namespace {

json point(const SeriesPoint& p) { return json{{"year", p.year}, {"value", p.value}}; }
SeriesPoint point_from(const json& j) { return {j.at("year").get<int>(), j.at("value").get<double>()}; }

Direction direction_from(const json& j) {
  auto d = parse_direction(j.get<std::string>());
  if (!d) throw Error(ErrorCode::Parse, "unknown direction " + j.dump());
  return *d;
}

}  // namespace

json payload_to_json(const Payload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TopKPayload>) {
          return {{"country", p.country}, {"year", p.year},   {"k", p.k},
                  {"direction", to_string(p.direction)},     {"rank", p.rank},
                  {"value", p.value},     {"n_countries", p.n_countries}};
        } else if constexpr (std::is_same_v<T, ConstantChangePayload>) {
          return {{"country", p.country}, {"direction", to_string(p.direction)},
                  {"n_years", p.n_years}, {"start", point(p.start)}, {"end", point(p.end)}};
        } else if constexpr (std::is_same_v<T, HistoricalExtremePayload>) {
          return {{"country", p.country}, {"year", p.year}, {"value", p.value},
                  {"direction", to_string(p.direction)}, {"n_years", p.n_years}};
        } else if constexpr (std::is_same_v<T, ChangeInRankPayload>) {
          return {{"country", p.country},         {"year_a", p.year_a},
                  {"year_b", p.year_b},           {"rank_a", p.rank_a},
                  {"rank_b", p.rank_b},           {"n_countries_a", p.n_countries_a},
                  {"n_countries_b", p.n_countries_b}, {"value_a", p.value_a},
                  {"value_b", p.value_b}};
        } else if constexpr (std::is_same_v<T, ChangeOverTimePayload>) {
          return {{"country", p.country}, {"year_a", p.year_a}, {"year_b", p.year_b},
                  {"value_a", p.value_a}, {"value_b", p.value_b}};
        } else {
          return {{"country", p.country}, {"year", p.year}, {"value", p.value}};
        }
      },
      payload);
}

Payload payload_from_json(ClaimType type, const json& j) {
  const std::string country = j.at("country").get<std::string>();
  switch (type) {
    case ClaimType::TopK:
      return TopKPayload{country, j.at("year").get<int>(), j.at("k").get<int>(),
                         direction_from(j.at("direction")), j.at("rank").get<int>(),
                         j.at("value").get<double>(), j.at("n_countries").get<int>()};
    case ClaimType::ConstantChange:
      return ConstantChangePayload{country, direction_from(j.at("direction")),
                                   j.at("n_years").get<int>(), point_from(j.at("start")),
                                   point_from(j.at("end"))};
    case ClaimType::HistoricalExtreme:
      return HistoricalExtremePayload{country, j.at("year").get<int>(), j.at("value").get<double>(),
                                      direction_from(j.at("direction")), j.at("n_years").get<int>()};
    case ClaimType::ChangeInRank:
      return ChangeInRankPayload{country,
                                 j.at("year_a").get<int>(),
                                 j.at("year_b").get<int>(),
                                 j.at("rank_a").get<int>(),
                                 j.at("rank_b").get<int>(),
                                 j.at("n_countries_a").get<int>(),
                                 j.at("n_countries_b").get<int>(),
                                 j.at("value_a").get<double>(),
                                 j.at("value_b").get<double>()};
    case ClaimType::ChangeOverTime:
      return ChangeOverTimePayload{country, j.at("year_a").get<int>(), j.at("year_b").get<int>(),
                                   j.at("value_a").get<double>(), j.at("value_b").get<double>()};
    case ClaimType::HaveTrait:
      return HaveTraitPayload{country, j.at("year").get<int>(), j.at("value").get<double>()};
  }
  throw Error(ErrorCode::Parse, "unknown claim type");
}

json to_json(const DataSample& sample) {
  json evidence = json::array();
  for (const auto& e : sample.evidence_rows) evidence.push_back(json::array({e.country, e.year, e.value}));
  return json{{"sample_id", sample.sample_id},
              {"claim_type", to_string(sample.claim_type)},
              {"table_id", sample.table_id},
              {"combination", to_json(sample.combination)},
              {"payload", payload_to_json(sample.payload)},
              {"evidence_rows", std::move(evidence)}};
}

DataSample sample_from_json(const json& j) {
  DataSample s;
  s.sample_id = j.at("sample_id").get<std::string>();
  auto type = parse_claim_type(j.at("claim_type").get<std::string>());
  if (!type) throw Error(ErrorCode::Parse, "unknown claim_type in sample " + s.sample_id);
  s.claim_type = *type;
  s.table_id = j.at("table_id").get<std::string>();
  s.combination = combination_from_json(j.at("combination"));
  s.payload = payload_from_json(s.claim_type, j.at("payload"));
  for (const auto& e : j.at("evidence_rows")) {
    s.evidence_rows.push_back({e.at(0).get<std::string>(), e.at(1).get<int>(), e.at(2).get<double>()});
  }
  return s;
}

json to_json(const ClaimRecord& claim) {
  json j{{"claim_id", claim.claim_id},
         {"language", to_string(claim.language)},
         {"text", claim.text},
         {"label", claim.label ? "True" : "False"},
         {"sample_id", claim.sample_id},
         {"claim_type", to_string(claim.claim_type)},
         {"table_ids", claim.table_ids},
         {"generator", to_string(claim.generator)}};
  if (!claim.parent_id.empty()) j["parent_id"] = claim.parent_id;
  if (!claim.prompt_hash.empty()) j["prompt_hash"] = claim.prompt_hash;
  if (claim.perturbation) {
    const auto& p = *claim.perturbation;
    j["perturbation"] = json{{"family", to_string(p.family)},
                             {"params", p.params},
                             {"field", p.field},
                             {"original_value", p.original_value},
                             {"perturbed_value", p.perturbed_value}};
  }
  return j;
}

ClaimRecord claim_from_json(const json& j) {
  ClaimRecord c;
  c.claim_id = j.at("claim_id").get<std::string>();
  c.parent_id = j.value("parent_id", "");
  auto lang = parse_language(j.at("language").get<std::string>());
  if (!lang) throw Error(ErrorCode::Parse, "bad language in claim " + c.claim_id);
  c.language = *lang;
  c.text = j.at("text").get<std::string>();
  const std::string label = j.at("label").get<std::string>();
  if (label != "True" && label != "False") throw Error(ErrorCode::Parse, "bad label in " + c.claim_id);
  c.label = label == "True";
  c.sample_id = j.value("sample_id", "");
  if (auto t = parse_claim_type(j.value("claim_type", "HaveTrait"))) c.claim_type = *t;
  c.table_ids = j.value("table_ids", std::vector<std::string>{});
  c.generator = j.value("generator", "template") == "llm" ? Generator::Llm : Generator::Template;
  c.prompt_hash = j.value("prompt_hash", "");
  if (j.contains("perturbation")) {
    const auto& p = j.at("perturbation");
    PerturbationDescriptor d;
    auto fam = parse_perturbation_family(p.at("family").get<std::string>());
    if (!fam) throw Error(ErrorCode::Parse, "bad perturbation family in " + c.claim_id);
    d.family = *fam;
    d.params = p.value("params", "");
    d.field = p.value("field", "");
    d.original_value = p.value("original_value", "");
    d.perturbed_value = p.value("perturbed_value", "");
    c.perturbation = d;
  }
  return c;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (const auto& r : rows) out << r.dump() << '\n';
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::vector<json> out;
  std::string line;
  long n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_samples(const std::filesystem::path& path, const std::vector<DataSample>& samples) {
  std::vector<const DataSample*> sorted;
  for (const auto& s : samples) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const DataSample* a, const DataSample* b) { return a->sample_id < b->sample_id; });
  std::vector<json> rows;
  rows.reserve(sorted.size());
  for (const auto* s : sorted) rows.push_back(to_json(*s));
  write_jsonl(path, rows);
}

std::vector<DataSample> read_samples(const std::filesystem::path& path) {
  std::vector<DataSample> out;
  for (const auto& j : read_jsonl(path)) out.push_back(sample_from_json(j));
  return out;
}

void write_claims(const std::filesystem::path& path, std::vector<ClaimRecord> claims) {
  std::sort(claims.begin(), claims.end(),
            [](const ClaimRecord& a, const ClaimRecord& b) { return a.claim_id < b.claim_id; });
  std::vector<json> rows;
  rows.reserve(claims.size());
  for (const auto& c : claims) rows.push_back(to_json(c));
  write_jsonl(path, rows);
}

std::vector<ClaimRecord> read_claims(const std::filesystem::path& path) {
  std::vector<ClaimRecord> out;
  for (const auto& j : read_jsonl(path)) out.push_back(claim_from_json(j));
  return out;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace statclaim
