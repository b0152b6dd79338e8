#include "statclaim/eval.hpp"

#include <algorithm>
#include <cmath>

#include "statclaim/error.hpp"

namespace statclaim {

using nlohmann::json;

namespace {

bool close_rel(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

double pct(std::size_t part, std::size_t total) {
  return total ? 100.0 * static_cast<double>(part) / static_cast<double>(total) : 0.0;
}

}  // namespace

double accuracy(const std::vector<Prediction>& predictions, const std::map<std::string, bool>& gold) {
  if (predictions.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& [id, verdict] : predictions) {
    auto it = gold.find(id);
    if (it == gold.end()) throw Error(ErrorCode::MissingGold, id);
    if (verdict == (it->second ? Verdict::True : Verdict::False)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd m;
  m.runs = values;
  if (values.empty()) return m;
  double sum = 0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

MeanStd verdict_accuracy(const std::vector<std::vector<Prediction>>& runs, const std::map<std::string, bool>& gold) {
  std::vector<double> acc;
  for (const auto& run : runs) acc.push_back(accuracy(run, gold));
  return mean_std(acc);
}

bool contains_evidence(const std::vector<EvidenceRow>& result, const std::vector<EvidenceRow>& evidence) {
  for (const auto& e : evidence) {
    const bool found = std::any_of(result.begin(), result.end(), [&](const EvidenceRow& r) {
      return r.country == e.country && r.year == e.year && close_rel(r.value, e.value);
    });
    if (!found) return false;
  }
  return true;
}

RetrievalReport retrieval_accuracy(const std::vector<VerificationTrace>& traces,
                                   const std::map<std::string, const ClaimRecord*>& claims,
                                   const std::map<std::string, const DataSample*>& samples) {
  RetrievalReport report;
  for (const auto& trace : traces) {
    auto c = claims.find(trace.claim_id);
    if (c == claims.end()) throw Error(ErrorCode::MissingGold, trace.claim_id);
    auto s = samples.find(c->second->sample_id);
    if (s == samples.end()) throw Error(ErrorCode::MissingGold, "sample " + c->second->sample_id);
    const std::string language(to_string(c->second->language));
    for (const auto& sub : trace.subclaims) {
      const bool table_hit = sub.chosen_table == s->second->table_id;
      const bool data_hit = table_hit && contains_evidence(sub.result_evidence, s->second->evidence_rows);
      const std::string verdict(to_string(sub.verdict));
      for (RetrievalCell* cell : {&report.overall, &report.by_language[language], &report.by_verdict[verdict],
                                  &report.by_language_verdict[language][verdict]}) {
        ++cell->count;
        cell->table_hits += table_hit;
        cell->data_hits += data_hit;
      }
    }
  }
  return report;
}

bool masked_fact_hit(double truth, double prediction, double p) {
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "tolerance must be nonnegative");
  if (!(truth > 0)) return close_rel(truth, prediction);
  const double lo = truth / (1 + p);
  const double hi = truth * (1 + p);
  const double eps = 1e-9 * truth;
  return prediction >= lo - eps && prediction <= hi + eps;
}

MaskedFactResult masked_fact_eval(const std::vector<MaskedPair>& pairs, double p) {
  MaskedFactResult r;
  r.p = p;
  for (const auto& pair : pairs) {
    ++r.total;
    if (!(pair.truth > 0)) ++r.nonpositive;
    if (masked_fact_hit(pair.truth, pair.prediction, p)) ++r.hits;
  }
  return r;
}

bool ToleranceCurve::monotone() const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].second < points[i - 1].second) return false;
  }
  return true;
}

ToleranceCurve tolerance_curve(const std::vector<MaskedPair>& pairs, std::vector<double> ps) {
  std::sort(ps.begin(), ps.end());
  ToleranceCurve c;
  for (double p : ps) c.points.emplace_back(p, masked_fact_eval(pairs, p).accuracy());
  return c;
}

double ConfusionMatrix::precision() const {
  return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
}

double ConfusionMatrix::recall() const {
  return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
}

double ConfusionMatrix::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

double ConfusionMatrix::percent(std::size_t cell) const { return pct(cell, total()); }

ConfusionMatrix confusion_matrix(const std::vector<std::pair<bool, bool>>& label_predicted) {
  ConfusionMatrix m;
  for (const auto& [label, predicted] : label_predicted) {
    if (label) {
      ++(predicted ? m.tp : m.fn);
    } else {
      ++(predicted ? m.fp : m.tn);
    }
  }
  return m;
}

std::vector<ConsistencyRow> consistency_table(const std::vector<ConsistencyItem>& items, const std::vector<double>& ps) {
  std::vector<ConsistencyRow> out;
  for (double p : ps) {
    ConsistencyRow row;
    row.p = p;
    std::size_t both = 0, only1 = 0, only2 = 0, neither = 0;
    for (const auto& item : items) {
      if (!item.label) continue;
      ++row.total;
      const bool t1 = masked_fact_hit(item.task1.truth, item.task1.prediction, p);
      if (t1 && item.task2_correct) ++both;
      else if (t1) ++only1;
      else if (item.task2_correct) ++only2;
      else ++neither;
    }
    row.both = pct(both, row.total);
    row.only_task1 = pct(only1, row.total);
    row.only_task2 = pct(only2, row.total);
    row.neither = pct(neither, row.total);
    out.push_back(row);
  }
  return out;
}

json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"stddev", m.stddev}, {"runs", m.runs}}; }

json to_json(const RetrievalCell& c) {
  return {{"count", c.count},
          {"table_hits", c.table_hits},
          {"data_hits", c.data_hits},
          {"table_accuracy", c.table_rate()},
          {"data_accuracy", c.data_rate()}};
}

json to_json(const RetrievalReport& r) {
  json by_lang = json::object(), by_verdict = json::object(), grid = json::object();
  for (const auto& [k, v] : r.by_language) by_lang[k] = to_json(v);
  for (const auto& [k, v] : r.by_verdict) by_verdict[k] = to_json(v);
  for (const auto& [lang, cells] : r.by_language_verdict) {
    for (const auto& [verdict, cell] : cells) grid[lang][verdict] = to_json(cell);
  }
  return {{"overall", to_json(r.overall)},
          {"by_language", by_lang},
          {"by_verdict", by_verdict},
          {"by_language_verdict", grid}};
}

json to_json(const ConfusionMatrix& m) {
  return {{"tp", m.tp},
          {"fn", m.fn},
          {"fp", m.fp},
          {"tn", m.tn},
          {"precision", m.precision()},
          {"recall", m.recall()},
          {"f1", m.f1()},
          {"percent", {{"tp", m.percent(m.tp)}, {"fn", m.percent(m.fn)}, {"fp", m.percent(m.fp)}, {"tn", m.percent(m.tn)}}}};
}

json to_json(const ToleranceCurve& c) {
  json pts = json::array();
  for (const auto& [p, a] : c.points) pts.push_back({{"p", p}, {"accuracy", a}});
  return pts;
}

json evaluation_report(const std::vector<std::vector<VerificationTrace>>& runs, const std::vector<ClaimRecord>& claims,
                       const std::vector<DataSample>& samples) {
  std::map<std::string, bool> gold;
  std::map<std::string, const ClaimRecord*> claim_by_id;
  for (const auto& c : claims) {
    gold[c.claim_id] = c.label;
    claim_by_id[c.claim_id] = &c;
  }
  std::map<std::string, const DataSample*> sample_by_id;
  for (const auto& s : samples) sample_by_id[s.sample_id] = &s;

  std::vector<std::vector<Prediction>> predictions;
  for (const auto& run : runs) {
    std::vector<Prediction> p;
    for (const auto& t : run) p.emplace_back(t.claim_id, t.final_verdict);
    predictions.push_back(std::move(p));
  }
  json report;
  report["verdict_accuracy"] = to_json(verdict_accuracy(predictions, gold));
  if (runs.empty()) return report;

  // Per-label verdict counts and accuracy by claim type for the first run.
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_type;
  std::vector<std::pair<bool, bool>> binary;
  for (const auto& [id, verdict] : predictions.front()) {
    const auto* c = claim_by_id.at(id);
    ++counts[c->label ? "True" : "False"][std::string(to_string(verdict))];
    auto& t = by_type[std::string(to_string(c->claim_type))];
    ++t.second;
    t.first += verdict == (c->label ? Verdict::True : Verdict::False);
    if (verdict != Verdict::NEI) binary.emplace_back(c->label, verdict == Verdict::True);
  }
  json type_json = json::object();
  for (const auto& [type, hc] : by_type) {
    type_json[type] = {{"count", hc.second},
                       {"accuracy", static_cast<double>(hc.first) / static_cast<double>(hc.second)}};
  }
  report["verdict_counts"] = counts;
  report["accuracy_by_claim_type"] = type_json;
  report["confusion_excluding_nei"] = to_json(confusion_matrix(binary));
  report["claims"] = predictions.front().size();
  report["retrieval"] = to_json(retrieval_accuracy(runs.front(), claim_by_id, sample_by_id));
  return report;
}

}  // namespace statclaim
