#include "statclaim/bm25.hpp"

#include <cctype>
#include <cmath>

namespace statclaim {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::size_t b = 0, e = cur.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
    if (e > b) out.push_back(cur.substr(b, e - b));
    cur.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  flush();
  return out;
}

Bm25Index::Bm25Index(const std::vector<std::string>& documents, Bm25Params params) : params_(params) {
  double total = 0;
  for (const auto& doc : documents) {
    std::unordered_map<std::string, int> counts;
    const auto tokens = tokenize(doc);
    for (const auto& t : tokens) ++counts[t];
    for (const auto& [term, n] : counts) ++doc_freq_[term];
    doc_lengths_.push_back(static_cast<double>(tokens.size()));
    total += static_cast<double>(tokens.size());
    term_counts_.push_back(std::move(counts));
  }
  avg_length_ = documents.empty() ? 0.0 : total / static_cast<double>(documents.size());
}

double Bm25Index::idf(const std::string& term) const {
  auto it = doc_freq_.find(term);
  const double df = it == doc_freq_.end() ? 0.0 : it->second;
  const double n = static_cast<double>(doc_lengths_.size());
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

std::vector<double> Bm25Index::scores(std::string_view query) const {
  std::vector<double> out(doc_lengths_.size(), 0.0);
  const auto terms = tokenize(query);
  for (const auto& term : terms) {
    if (!doc_freq_.count(term)) continue;
    const double w = idf(term);
    for (std::size_t d = 0; d < out.size(); ++d) {
      auto it = term_counts_[d].find(term);
      if (it == term_counts_[d].end()) continue;
      const double tf = it->second;
      const double norm = avg_length_ > 0 ? doc_lengths_[d] / avg_length_ : 1.0;
      out[d] += w * tf * (params_.k1 + 1) / (tf + params_.k1 * (1 - params_.b + params_.b * norm));
    }
  }
  return out;
}

}  // namespace statclaim
