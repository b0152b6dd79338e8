#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "statclaim/claims.hpp"
#include "statclaim/extract.hpp"
#include "statclaim/verifier.hpp"

namespace statclaim {

using Prediction = std::pair<std::string, Verdict>;

/// Share of predictions equal to the gold label (NEI is never correct).
/// Throws MissingGold for a prediction whose claim has no label.
double accuracy(const std::vector<Prediction>& predictions, const std::map<std::string, bool>& gold);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one run
  std::vector<double> runs;
};
MeanStd mean_std(const std::vector<double>& values);
MeanStd verdict_accuracy(const std::vector<std::vector<Prediction>>& runs, const std::map<std::string, bool>& gold);

struct RetrievalCell {
  std::size_t count = 0;
  std::size_t table_hits = 0;
  std::size_t data_hits = 0;
  double table_rate() const { return count ? static_cast<double>(table_hits) / static_cast<double>(count) : 0.0; }
  double data_rate() const { return count ? static_cast<double>(data_hits) / static_cast<double>(count) : 0.0; }
};

/// Subclaim-level retrieval accuracy. Cells are keyed by claim language and
/// by the subclaim's predicted verdict; "overall" pools every subclaim,
/// which equals the count-weighted mean of the verdict groups.
struct RetrievalReport {
  RetrievalCell overall;
  std::map<std::string, RetrievalCell> by_language;
  std::map<std::string, RetrievalCell> by_verdict;
  std::map<std::string, std::map<std::string, RetrievalCell>> by_language_verdict;
};

/// Every evidence row appears in the result (same country and year, value
/// within 1e-9 relative).
bool contains_evidence(const std::vector<EvidenceRow>& result, const std::vector<EvidenceRow>& evidence);

/// Table hit: the chosen table is the sample's. Data hit: table hit and the
/// result contains every evidence row.
RetrievalReport retrieval_accuracy(const std::vector<VerificationTrace>& traces,
                                   const std::map<std::string, const ClaimRecord*>& claims,
                                   const std::map<std::string, const DataSample*>& samples);

struct MaskedPair {
  double truth = 0.0;
  double prediction = 0.0;
};

/// v/(1+p) <= u <= v(1+p), bounds inclusive up to 1e-9 relative. Nonpositive
/// truths only match exactly.
bool masked_fact_hit(double truth, double prediction, double p);

struct MaskedFactResult {
  double p = 0.0;
  std::size_t total = 0;
  std::size_t hits = 0;
  std::size_t nonpositive = 0;
  double accuracy() const { return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0; }
};
MaskedFactResult masked_fact_eval(const std::vector<MaskedPair>& pairs, double p);

struct ToleranceCurve {
  std::vector<std::pair<double, double>> points;  // (p, accuracy), p ascending
  bool monotone() const;
};
ToleranceCurve tolerance_curve(const std::vector<MaskedPair>& pairs, std::vector<double> ps);

/// Positive class is True. Percentages are over the grand total.
struct ConfusionMatrix {
  std::size_t tp = 0;  // label True, predicted True
  std::size_t fn = 0;  // label True, predicted False
  std::size_t fp = 0;  // label False, predicted True
  std::size_t tn = 0;  // label False, predicted False
  std::size_t total() const { return tp + fn + fp + tn; }
  double precision() const;
  double recall() const;
  double f1() const;
  double percent(std::size_t cell) const;
};
ConfusionMatrix confusion_matrix(const std::vector<std::pair<bool, bool>>& label_predicted);

struct ConsistencyItem {
  std::string claim_id;
  bool label = true;
  MaskedPair task1;
  bool task2_correct = false;
};

struct ConsistencyRow {
  double p = 0.0;
  std::size_t total = 0;
  double both = 0.0;       // task 1 hit, task 2 correct
  double only_task1 = 0.0;
  double only_task2 = 0.0;
  double neither = 0.0;
};
/// Percentages over true claims only; each row sums to 100.
std::vector<ConsistencyRow> consistency_table(const std::vector<ConsistencyItem>& items, const std::vector<double>& ps);

nlohmann::json to_json(const MeanStd& m);
nlohmann::json to_json(const RetrievalCell& c);
nlohmann::json to_json(const RetrievalReport& r);
nlohmann::json to_json(const ConfusionMatrix& m);
nlohmann::json to_json(const ToleranceCurve& c);

/// Verdict accuracy over the given runs plus retrieval accuracy of the first
/// run, as one stable-ordered report.
nlohmann::json evaluation_report(const std::vector<std::vector<VerificationTrace>>& runs,
                                 const std::vector<ClaimRecord>& claims, const std::vector<DataSample>& samples);

}  // namespace statclaim
