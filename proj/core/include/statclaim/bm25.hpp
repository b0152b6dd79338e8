#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace statclaim {

/// Splits on whitespace, lowercases ASCII, and strips punctuation from both
/// ends of each token ("fatalities." -> "fatalities").
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Okapi BM25 over a fixed document set with idf = ln(1 + (N - df + 0.5) / (df + 0.5)),
/// which is never negative. A document scores 0 unless it shares a term
/// with the query.
class Bm25Index {
 public:
  explicit Bm25Index(const std::vector<std::string>& documents, Bm25Params params = {});

  /// One score per document, in input order. Query terms count with multiplicity.
  std::vector<double> scores(std::string_view query) const;

  std::size_t size() const { return doc_lengths_.size(); }
  double idf(const std::string& term) const;
  double average_length() const { return avg_length_; }

 private:
  Bm25Params params_;
  std::vector<std::unordered_map<std::string, int>> term_counts_;
  std::vector<double> doc_lengths_;
  std::unordered_map<std::string, int> doc_freq_;
  double avg_length_ = 0.0;
};

}  // namespace statclaim
