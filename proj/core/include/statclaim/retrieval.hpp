#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "statclaim/bm25.hpp"
#include "statclaim/table_store.hpp"

namespace statclaim {

struct TableRepresentation {
  std::string table_id;
  std::string text;
  std::size_t token_estimate = 0;
};

/// Name, description (omitted when empty), then one "COLUMN: v1, v2, ..."
/// line per reference-area and measure column listing its most frequent
/// values (count descending, then value).
TableRepresentation build_representation(const TableStore& store, const SourceTable& table,
                                         std::size_t max_values_per_column = 10);
std::vector<TableRepresentation> build_representations(const TableStore& store,
                                                       std::size_t max_values_per_column = 10);

/// Similarity between a query and each candidate; higher is more similar.
class RetrievalScorer {
 public:
  virtual ~RetrievalScorer() = default;
  virtual std::string kind() const = 0;
  virtual std::vector<double> score(const std::string& query,
                                    const std::vector<TableRepresentation>& corpus) = 0;
};

/// BM25 over representation texts; the index is rebuilt when the corpus changes.
class LexicalScorer : public RetrievalScorer {
 public:
  explicit LexicalScorer(Bm25Params params = {});
  std::string kind() const override { return "lexical-bm25"; }
  std::vector<double> score(const std::string& query, const std::vector<TableRepresentation>& corpus) override;

 private:
  Bm25Params params_;
  std::string corpus_key_;
  std::unique_ptr<Bm25Index> index_;
};

struct HttpScorerConfig {
  std::string base_url;
  std::string embed_path = "/embed";
  std::string rerank_path = "/rerank";
  double timeout_seconds = 30.0;
};

/// Cosine similarity of embeddings from an HTTP endpoint:
///   POST embed_path {"input": [texts]} -> {"embeddings": [[...], ...]}
///   (an OpenAI-style {"data": [{"embedding": [...]}]} body is also read).
/// Document embeddings are cached per text. Failures raise ScorerUnavailable.
class HttpEmbeddingScorer : public RetrievalScorer {
 public:
  explicit HttpEmbeddingScorer(HttpScorerConfig config);
  std::string kind() const override { return "external-embedding"; }
  std::vector<double> score(const std::string& query, const std::vector<TableRepresentation>& corpus) override;

 private:
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts);
  HttpScorerConfig config_;
  std::map<std::string, std::vector<double>> cache_;
};

/// Scores (query, candidate text) pairs.
class Reranker {
 public:
  virtual ~Reranker() = default;
  virtual std::vector<double> rerank(const std::string& query, const std::vector<std::string>& candidates) = 0;
};

/// POST rerank_path {"query": q, "documents": [...]} -> {"scores": [...]}.
class HttpReranker : public Reranker {
 public:
  explicit HttpReranker(HttpScorerConfig config);
  std::vector<double> rerank(const std::string& query, const std::vector<std::string>& candidates) override;

 private:
  HttpScorerConfig config_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

struct RankedTable {
  std::string table_id;
  double score = 0.0;
  bool operator==(const RankedTable&) const = default;
};

/// Top `top_n` by score descending, ties by table_id. A reranker replaces
/// the scores of those candidates and the list is re-sorted.
std::vector<RankedTable> retrieve_table(const std::string& subclaim, const std::vector<TableRepresentation>& corpus,
                                        RetrievalScorer& scorer, std::size_t top_n = 5,
                                        Reranker* reranker = nullptr);

/// All values when there are at most `cap`; otherwise the `cap` values with
/// the highest BM25 score against the subclaim, ties in input order.
/// Returned in input order.
std::vector<std::string> select_values(const std::string& subclaim, const std::vector<std::string>& uniques,
                                       std::size_t cap = 20);

}  // namespace statclaim
