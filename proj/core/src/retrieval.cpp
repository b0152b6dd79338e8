#include "statclaim/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"

namespace statclaim {

using nlohmann::json;

namespace {

std::string quote(const std::string& ident) {
  std::string out = "\"";
  for (char c : ident) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json post_json(const HttpScorerConfig& config, const std::string& path, const json& body) {
  httplib::Client client(config.base_url);
  const auto secs = static_cast<time_t>(config.timeout_seconds);
  client.set_connection_timeout(secs);
  client.set_read_timeout(secs);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw Error(ErrorCode::ScorerUnavailable, config.base_url + ": " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw Error(ErrorCode::ScorerUnavailable, config.base_url + path + ": HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ScorerUnavailable, std::string("scorer response is not JSON: ") + e.what());
  }
}

}  // namespace

TableRepresentation build_representation(const TableStore& store, const SourceTable& table,
                                         std::size_t max_values_per_column) {
  std::string text = table.name.empty() ? table.table_id : table.name;
  if (!table.description.empty()) text += "\n" + table.description;
  for (const auto& col : table.columns) {
    if (col.role != ColumnRole::ReferenceArea && col.role != ColumnRole::Measure) continue;
    const std::string q = quote(col.name);
    const auto rs = store.run_query("SELECT " + q + ", COUNT(*) AS n FROM " + quote(table.table_id) + " WHERE " + q +
                                    " IS NOT NULL GROUP BY " + q + " ORDER BY n DESC, " + q + " LIMIT " +
                                    std::to_string(max_values_per_column));
    if (rs.rows.empty()) continue;
    text += "\n" + col.name + ":";
    for (std::size_t i = 0; i < rs.rows.size(); ++i) {
      text += (i == 0 ? " " : ", ") + cell_to_string(rs.rows[i][0]);
    }
  }
  TableRepresentation r;
  r.table_id = table.table_id;
  r.token_estimate = tokenize(text).size();
  r.text = std::move(text);
  return r;
}

std::vector<TableRepresentation> build_representations(const TableStore& store, std::size_t max_values_per_column) {
  std::vector<TableRepresentation> out;
  for (const auto& t : store.tables()) out.push_back(build_representation(store, t, max_values_per_column));
  return out;
}

LexicalScorer::LexicalScorer(Bm25Params params) : params_(params) {}

std::vector<double> LexicalScorer::score(const std::string& query, const std::vector<TableRepresentation>& corpus) {
  std::string key;
  for (const auto& r : corpus) key += r.table_id + '\x1f' + r.text + '\x1e';
  key = sha256_hex(key);
  if (!index_ || key != corpus_key_) {
    std::vector<std::string> docs;
    for (const auto& r : corpus) docs.push_back(r.text);
    index_ = std::make_unique<Bm25Index>(docs, params_);
    corpus_key_ = key;
  }
  return index_->scores(query);
}

HttpEmbeddingScorer::HttpEmbeddingScorer(HttpScorerConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw Error(ErrorCode::InvalidArgument, "scorer base URL is empty");
}

std::vector<std::vector<double>> HttpEmbeddingScorer::embed(const std::vector<std::string>& texts) {
  const json res = post_json(config_, config_.embed_path, json{{"input", texts}});
  std::vector<std::vector<double>> out;
  try {
    if (res.contains("embeddings")) {
      out = res.at("embeddings").get<std::vector<std::vector<double>>>();
    } else {
      for (const auto& d : res.at("data")) out.push_back(d.at("embedding").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ScorerUnavailable, std::string("malformed embedding response: ") + e.what());
  }
  if (out.size() != texts.size()) throw Error(ErrorCode::ScorerUnavailable, "embedding count mismatch");
  return out;
}

std::vector<double> HttpEmbeddingScorer::score(const std::string& query,
                                               const std::vector<TableRepresentation>& corpus) {
  std::vector<std::string> missing;
  for (const auto& r : corpus) {
    if (!cache_.count(r.text)) missing.push_back(r.text);
  }
  if (!missing.empty()) {
    auto vecs = embed(missing);
    for (std::size_t i = 0; i < missing.size(); ++i) cache_[missing[i]] = std::move(vecs[i]);
  }
  const auto q = embed({query}).front();
  std::vector<double> out;
  for (const auto& r : corpus) out.push_back(cosine_similarity(q, cache_.at(r.text)));
  return out;
}

HttpReranker::HttpReranker(HttpScorerConfig config) : config_(std::move(config)) {}

std::vector<double> HttpReranker::rerank(const std::string& query, const std::vector<std::string>& candidates) {
  const json res = post_json(config_, config_.rerank_path, json{{"query", query}, {"documents", candidates}});
  std::vector<double> scores;
  try {
    scores = res.at("scores").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ScorerUnavailable, std::string("malformed rerank response: ") + e.what());
  }
  if (scores.size() != candidates.size()) throw Error(ErrorCode::ScorerUnavailable, "rerank count mismatch");
  return scores;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<RankedTable> retrieve_table(const std::string& subclaim, const std::vector<TableRepresentation>& corpus,
                                        RetrievalScorer& scorer, std::size_t top_n, Reranker* reranker) {
  if (corpus.empty()) throw Error(ErrorCode::InvalidArgument, "empty retrieval corpus");
  const auto scores = scorer.score(subclaim, corpus);
  if (scores.size() != corpus.size()) throw Error(ErrorCode::ScorerUnavailable, "scorer returned wrong count");
  std::vector<RankedTable> ranked;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(ErrorCode::ScorerUnavailable, "non-finite score");
    ranked.push_back({corpus[i].table_id, scores[i]});
  }
  auto order = [](const RankedTable& a, const RankedTable& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.table_id < b.table_id;
  };
  std::sort(ranked.begin(), ranked.end(), order);
  if (ranked.size() > top_n) ranked.resize(top_n);
  if (reranker && !ranked.empty()) {
    std::vector<std::string> texts;
    for (const auto& r : ranked) {
      auto it = std::find_if(corpus.begin(), corpus.end(),
                             [&](const TableRepresentation& t) { return t.table_id == r.table_id; });
      texts.push_back(it->text);
    }
    const auto s = reranker->rerank(subclaim, texts);
    if (s.size() != ranked.size()) throw Error(ErrorCode::ScorerUnavailable, "reranker returned wrong count");
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].score = s[i];
    std::sort(ranked.begin(), ranked.end(), order);
  }
  return ranked;
}

std::vector<std::string> select_values(const std::string& subclaim, const std::vector<std::string>& uniques,
                                       std::size_t cap) {
  if (uniques.size() <= cap) return uniques;
  const Bm25Index index(uniques);
  const auto scores = index.scores(subclaim);
  std::vector<std::size_t> idx(uniques.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(uniques[i]);
  return out;
}

}  // namespace statclaim
