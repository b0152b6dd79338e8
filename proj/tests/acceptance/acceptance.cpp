// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "../support/support.hpp"
#include "statclaim/eval.hpp"
#include "statclaim/hashing.hpp"
#include "statclaim/oracle.hpp"
#include "statclaim/partition.hpp"
#include "statclaim/perturb.hpp"
#include "statclaim/pipeline.hpp"
#include "statclaim/random.hpp"
#include "statclaim/retrieval.hpp"
#include "statclaim/scripted.hpp"
#include "statclaim/templates.hpp"
#include "statclaim/verifier.hpp"

using namespace statclaim;
using statclaim::testing::TempDir;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<DataSample> sorted(std::vector<DataSample> v) {
  std::sort(v.begin(), v.end(), [](const DataSample& a, const DataSample& b) { return a.sample_id < b.sample_id; });
  return v;
}

// ---------------------------------------------------------------- 1

Outcome extractor_oracle_equivalence() {
  const auto t0 = Clock::now();
  std::map<std::string, std::size_t> counts;
  std::size_t mismatches = 0;
  std::string first;
  for (int i = 0; i < 100; ++i) {
    const auto s = testing::random_slice(derive_seed(2024, "slice|" + std::to_string(i)), 40, 30);
    const SliceContext ctx{s.table_id, s.combination};
    std::vector<DataSample> cc, he;
    for (const auto& series : build_series(s)) {
      auto a = extract_constant_change(series, ctx);
      auto b = extract_historical_extreme(series, ctx);
      cc.insert(cc.end(), a.begin(), a.end());
      he.insert(he.end(), b.begin(), b.end());
    }
    const auto ranks = extract_rank_shifts(s);
    const auto cot = derive_change_over_time(ranks);
    const std::vector<std::pair<std::string, std::pair<std::vector<DataSample>, std::vector<DataSample>>>> pairs{
        {"TopK", {extract_top_k(s), oracle::top_k(s)}},
        {"ConstantChange", {cc, oracle::constant_change(s)}},
        {"HistoricalExtreme", {he, oracle::historical_extreme(s)}},
        {"ChangeInRank", {ranks, oracle::rank_shifts(s)}},
        {"ChangeOverTime", {cot, oracle::change_over_time(s)}},
        {"HaveTrait", {derive_have_trait(ranks, cot), oracle::have_trait(s)}},
    };
    for (const auto& [name, p] : pairs) {
      const auto got = sorted(p.first);
      const auto want = sorted(p.second);
      counts[name] += want.size();
      if (got != want) {
        ++mismatches;
        if (first.empty()) {
          first = name + " on slice " + std::to_string(i) + " (" + std::to_string(got.size()) + " vs " +
                  std::to_string(want.size()) + ")";
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  bool nonvacuous = true;
  std::ostringstream d;
  d << "100 slices, " << mismatches << " mismatching extractor sets";
  for (const auto& [k, v] : counts) {
    d << ", " << k << "=" << v;
    nonvacuous = nonvacuous && v > 0;
  }
  d << ", " << fmt("%.1f", secs) << " s (limit 60 s)";
  if (!first.empty()) d << "; first: " << first;
  return {mismatches == 0 && nonvacuous && secs < 60.0, d.str()};
}

// ---------------------------------------------------------------- 2

int rank_from_rows(const std::vector<EvidenceRow>& rows, int year, const std::string& country) {
  double mine = 0;
  bool found = false;
  for (const auto& r : rows) {
    if (r.year == year && r.country == country) {
      mine = r.value;
      found = true;
    }
  }
  if (!found) return -1;
  int ahead = 0;
  for (const auto& r : rows) {
    if (r.year == year && (r.value > mine || (r.value == mine && r.country < country))) ++ahead;
  }
  return ahead + 1;
}

int count_year(const std::vector<EvidenceRow>& rows, int year) {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const EvidenceRow& r) { return r.year == year; }));
}

/// Independent restatement of the thresholds each claim type must meet.
std::vector<std::string> threshold_violations(const DataSample& s, const TimeWindow& w) {
  std::vector<std::string> v;
  auto in = [&](int y) { return y >= w.start_year && y <= w.end_year; };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TopKPayload>) {
          const int n = count_year(s.evidence_rows, p.year);
          if (n != p.n_countries) v.push_back("TopK n_countries");
          if (n < 20) v.push_back("TopK under 20 countries");
          if (p.k != (n > 50 ? 5 : 3)) v.push_back("TopK k rule");
          int r = rank_from_rows(s.evidence_rows, p.year, p.country);
          if (p.direction == Direction::Bottom) r = n - r + 1;
          if (r != p.rank || r < 1 || r > p.k) v.push_back("TopK rank");
          if (!in(p.year)) v.push_back("TopK window");
        } else if constexpr (std::is_same_v<T, ConstantChangePayload>) {
          if (p.n_years < 8) v.push_back("run shorter than 8 years");
          if (p.end.year - p.start.year + 1 != p.n_years) v.push_back("run span");
          if (static_cast<int>(s.evidence_rows.size()) != p.n_years) v.push_back("run evidence size");
          for (std::size_t i = 1; i < s.evidence_rows.size(); ++i) {
            const auto& a = s.evidence_rows[i - 1];
            const auto& b = s.evidence_rows[i];
            const bool ok = b.year == a.year + 1 &&
                            (p.direction == Direction::Increase ? b.value > a.value : b.value < a.value);
            if (!ok) v.push_back("run not strictly monotone over consecutive years");
          }
          if (!in(p.start.year) || !in(p.end.year)) v.push_back("run window");
        } else if constexpr (std::is_same_v<T, HistoricalExtremePayload>) {
          if (p.n_years < 10) v.push_back("extreme N under 10");
          for (const auto& r : s.evidence_rows) {
            if (r.year > p.year - p.n_years && r.year < p.year) {
              const bool beaten = p.direction == Direction::Highest ? r.value >= p.value : r.value <= p.value;
              if (beaten) v.push_back("extreme beaten inside its span");
            }
          }
          if (!in(p.year)) v.push_back("extreme window");
        } else if constexpr (std::is_same_v<T, ChangeInRankPayload>) {
          if (p.year_a >= p.year_b) v.push_back("rank years");
          const int shift = std::abs(p.rank_a - p.rank_b);
          const int needed = std::max(10, static_cast<int>(std::ceil(0.2 * p.n_countries_a - 1e-9)));
          const bool ratio = std::max(p.rank_a, p.rank_b) >= 2 * std::min(p.rank_a, p.rank_b);
          if (shift < needed && !ratio) v.push_back("rank shift not substantial");
          if (rank_from_rows(s.evidence_rows, p.year_a, p.country) != p.rank_a ||
              rank_from_rows(s.evidence_rows, p.year_b, p.country) != p.rank_b) {
            v.push_back("rank does not match evidence");
          }
          if (!in(p.year_a) || !in(p.year_b)) v.push_back("rank window");
        } else if constexpr (std::is_same_v<T, ChangeOverTimePayload>) {
          if (p.year_a >= p.year_b) v.push_back("cot years");
          if (!in(p.year_a) || !in(p.year_b)) v.push_back("cot window");
        } else {
          if (!in(p.year)) v.push_back("trait window");
        }
      },
      s.payload);
  return v;
}

std::vector<std::string> window_violations(const PreparedTable& t) {
  std::vector<std::string> v;
  std::map<int, std::set<std::string>> areas;
  for (const auto& r : t.view.rows) areas[r.year].insert(r.reference_area);
  std::size_t peak = 0;
  for (const auto& [y, a] : areas) peak = std::max(peak, a.size());
  if (peak < 20) v.push_back("window peak coverage under 20");
  if (t.window.length() < 2) v.push_back("window shorter than 2 years");
  for (int y = t.window.start_year; y <= t.window.end_year; ++y) {
    if (static_cast<double>(areas[y].size()) < 0.95 * static_cast<double>(peak)) v.push_back("window year under 0.95");
  }
  return v;
}

Outcome threshold_conformance(const std::filesystem::path& dir) {
  std::size_t samples = 0, violations = 0, fixtures = 0, k5 = 0;
  std::string first;
  for (std::uint64_t seed = 101; samples < 10000; ++seed) {
    FixtureConfig fc;
    fc.n_tables = 6;
    fc.n_countries = seed % 2 ? 56 : 42;  // both sides of the k=5 rule
    fc.n_years = 25;
    fc.seed = seed;
    const auto fx = testing::prepare_fixture(fc, dir / ("thresholds" + std::to_string(seed)));
    ++fixtures;
    std::map<std::string, const TimeWindow*> windows;
    for (const auto& t : fx.prepared.tables) {
      windows[t.view.table.table_id] = &t.window;
      for (const auto& msg : window_violations(t)) {
        ++violations;
        if (first.empty()) first = t.view.table.table_id + ": " + msg;
      }
    }
    for (const auto& s : fx.samples) {
      for (const auto& msg : threshold_violations(s, *windows.at(s.table_id))) {
        ++violations;
        if (first.empty()) first = s.sample_id + ": " + msg;
      }
    }
    samples += fx.samples.size();
    for (const auto& s : fx.samples) {
      if (const auto* p = std::get_if<TopKPayload>(&s.payload)) k5 += p->k == 5 ? 1 : 0;
    }
  }
  std::ostringstream d;
  d << samples << " samples from " << fixtures << " fixtures (" << k5 << " TopK with k=5), " << violations
    << " violations";
  if (!first.empty()) d << "; first: " << first;
  return {violations == 0 && samples >= 10000 && k5 > 0, d.str()};
}

// ---------------------------------------------------------------- 3

Outcome masked_fact_arithmetic(const std::filesystem::path& dir) {
  // 1000 pairs: 20 exact, 129 more within 25%, 95 more within 50%, the rest outside.
  Rng rng(4);
  nlohmann::json lines = nlohmann::json::array();
  auto add = [&](int count, double lo, double hi) {
    for (int i = 0; i < count; ++i) {
      const double truth = 0.1 + 1e4 * rng.unit();
      const double f = lo + (hi - lo) * rng.unit();
      const double pred = f == 1.0 ? truth : (rng.coin() ? truth * f : truth / f);
      lines.push_back({{"truth", truth}, {"prediction", pred}});
    }
  };
  add(20, 1.0, 1.0);
  add(129, 1.01, 1.24);
  add(95, 1.26, 1.49);
  add(756, 1.6, 4.0);
  const auto path = dir / "masked_predictions.jsonl";
  {
    std::ostringstream out;
    for (const auto& l : lines) out << l.dump() << '\n';
    testing::write_text(path, out.str());
  }
  std::vector<MaskedPair> pairs;
  {
    std::istringstream in(testing::read_text(path));
    std::string line;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      pairs.push_back({j.at("truth").get<double>(), j.at("prediction").get<double>()});
    }
  }
  const std::pair<double, double> targets[] = {{0.0, 2.0}, {0.25, 14.9}, {0.5, 24.4}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& [p, want] : targets) {
    const double got = 100.0 * masked_fact_eval(pairs, p).accuracy();
    ok = ok && std::abs(got - want) <= 0.05;
    d << "p=" << p << ": " << fmt("%.3f", got) << "% (want " << want << "), ";
  }
  d << "tolerance 0.05 pp";
  return {ok, d.str()};
}

// ---------------------------------------------------------------- 4

Outcome confusion_reproduction() {
  std::vector<std::pair<bool, bool>> pairs;
  pairs.insert(pairs.end(), 996, {true, true});
  pairs.insert(pairs.end(), 6838, {true, false});
  pairs.insert(pairs.end(), 614, {false, true});
  pairs.insert(pairs.end(), 6195, {false, false});
  const auto m = confusion_matrix(pairs);
  const double p = 100 * m.precision(), r = 100 * m.recall(), f = 100 * m.f1();
  const bool ok = std::abs(p - 61.8) <= 0.1 && std::abs(r - 12.7) <= 0.1 && std::abs(f - 21.1) <= 0.1 &&
                  m.tp == 996 && m.fn == 6838 && m.fp == 614 && m.tn == 6195;
  return {ok, "precision " + fmt("%.3f", p) + "% (61.8), recall " + fmt("%.3f", r) + "% (12.7), F1 " +
                  fmt("%.3f", f) + "% (21.1), tolerance 0.1 pp"};
}

// ---------------------------------------------------------------- 5, 6

/// 100 false claims spread over the claim types, plus their true parents.
std::vector<ClaimRecord> pick_pairs(const std::vector<ClaimRecord>& claims, std::size_t n_pairs) {
  std::map<std::string, const ClaimRecord*> by_id;
  std::map<ClaimType, std::vector<const ClaimRecord*>> false_by_type;
  for (const auto& c : claims) {
    by_id[c.claim_id] = &c;
    if (!c.label) false_by_type[c.claim_type].push_back(&c);
  }
  std::vector<ClaimRecord> out;
  std::size_t taken = 0;
  for (std::size_t round = 0; taken < n_pairs; ++round) {
    bool any = false;
    for (auto& [type, list] : false_by_type) {
      if (round >= list.size() || taken == n_pairs) continue;
      any = true;
      out.push_back(*list[round]);
      out.push_back(*by_id.at(list[round]->parent_id));
      ++taken;
    }
    if (!any) break;
  }
  std::sort(out.begin(), out.end(), [](const ClaimRecord& a, const ClaimRecord& b) { return a.claim_id < b.claim_id; });
  return out;
}

std::vector<ClaimToVerify> to_verify(const std::vector<ClaimRecord>& claims) {
  std::vector<ClaimToVerify> out;
  for (const auto& c : claims) out.push_back({c.claim_id, c.text, c.table_ids.front()});
  return out;
}

double verdict_accuracy_of(const std::vector<VerificationTrace>& traces, const std::vector<ClaimRecord>& claims) {
  std::map<std::string, bool> gold;
  for (const auto& c : claims) gold[c.claim_id] = c.label;
  std::size_t right = 0;
  for (const auto& t : traces) {
    const bool label = gold.at(t.claim_id);
    if (t.final_verdict == (label ? Verdict::True : Verdict::False)) ++right;
  }
  return traces.empty() ? 0.0 : static_cast<double>(right) / static_cast<double>(traces.size());
}

Outcome gold_oracle_end_to_end(const testing::PreparedFixture& fx, const std::vector<ClaimRecord>& chosen) {
  const auto t0 = Clock::now();
  GoldOracleAdapter adapter(fx.store);
  VerifierConfig cfg;
  cfg.gold_tables = true;
  cfg.threads = 4;
  Verifier verifier(fx.store, adapter, nullptr, cfg);
  const auto traces = verifier.verify_all(to_verify(chosen));
  const double secs = seconds_since(t0);

  std::map<std::string, const ClaimRecord*> claim_map;
  std::size_t n_true = 0;
  for (const auto& c : chosen) {
    claim_map[c.claim_id] = &c;
    n_true += c.label ? 1 : 0;
  }
  const auto r = retrieval_accuracy(traces, claim_map, fx.by_id);
  const double acc = verdict_accuracy_of(traces, chosen);
  std::set<ClaimType> types;
  for (const auto& c : chosen) types.insert(c.claim_type);
  const bool ok = chosen.size() == 200 && n_true == 100 && acc == 1.0 && r.overall.count == 200 &&
                  r.overall.table_rate() == 1.0 && r.overall.data_rate() == 1.0 && secs < 120.0;
  std::ostringstream d;
  d << chosen.size() << " claims (" << n_true << " true, " << types.size() << " types), verdict accuracy "
    << fmt("%.1f", 100 * acc) << "%, table retrieval " << fmt("%.1f", 100 * r.overall.table_rate())
    << "%, data retrieval " << fmt("%.1f", 100 * r.overall.data_rate()) << "%, " << fmt("%.1f", secs)
    << " s (limit 120 s), offline adapters";
  return {ok, d.str()};
}

Outcome degradation_ordering(const testing::PreparedFixture& fx, const std::vector<ClaimRecord>& chosen) {
  auto lossy = std::make_shared<LossySqlAdapter>(std::make_shared<GoldOracleAdapter>(fx.store), 0.30, 99);
  std::size_t forced = 0;
  for (const auto& c : chosen) forced += lossy->fails(c.text) ? 1 : 0;

  VerifierConfig gold_cfg;
  gold_cfg.gold_tables = true;
  gold_cfg.threads = 4;
  Verifier gold(fx.store, *lossy, nullptr, gold_cfg);
  const double gold_acc = verdict_accuracy_of(gold.verify_all(to_verify(chosen)), chosen);

  LexicalScorer scorer;
  VerifierConfig ret_cfg;
  ret_cfg.threads = 4;
  Verifier retrieval(fx.store, *lossy, &scorer, ret_cfg);
  const double ret_acc = verdict_accuracy_of(retrieval.verify_all(to_verify(chosen)), chosen);

  std::ostringstream d;
  d << "forced SQL failures on " << forced << "/" << chosen.size() << " claims; gold tables "
    << fmt("%.1f", 100 * gold_acc) << "% > retrieval " << fmt("%.1f", 100 * ret_acc) << "%";
  return {gold_acc > ret_acc, d.str()};
}

// ---------------------------------------------------------------- 7

double stated(const std::string& text) { return std::stod(text); }

/// Whether the false claim's text differs from the gold payload in the field
/// its family edits.
bool differs_in_field(const ParsedClaim& c, const DataSample& s, PerturbationFamily family) {
  return std::visit(
      [&](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TopKPayload>) {
          if (family == PerturbationFamily::Binary) return !c.rank_form && c.direction != p.direction;
          const int absolute = p.direction == Direction::Top ? p.rank : p.n_countries - p.rank + 1;
          return family == PerturbationFamily::Rank && c.rank_form && c.rank != absolute;
        } else if constexpr (std::is_same_v<T, ConstantChangePayload>) {
          if (family == PerturbationFamily::Binary) return c.direction != p.direction;
          return family == PerturbationFamily::Duration &&
                 std::make_pair(c.year - c.n_years + 1, c.year) != std::make_pair(p.start.year, p.end.year);
        } else if constexpr (std::is_same_v<T, HistoricalExtremePayload>) {
          if (family == PerturbationFamily::Binary) return c.direction != p.direction;
          return family == PerturbationFamily::Duration && c.year == p.year && c.n_years != p.n_years;
        } else if constexpr (std::is_same_v<T, ChangeInRankPayload>) {
          return (family == PerturbationFamily::Rank || family == PerturbationFamily::Binary) &&
                 std::make_pair(c.rank, c.rank_b) != std::make_pair(p.rank_a, p.rank_b);
        } else if constexpr (std::is_same_v<T, ChangeOverTimePayload>) {
          return family == PerturbationFamily::Numeric &&
                 !(values_agree(stated(c.value_text), p.value_a) && values_agree(stated(c.value_b_text), p.value_b));
        } else {
          return family == PerturbationFamily::Numeric && !values_agree(stated(c.value_text), p.value);
        }
      },
      s.payload);
}

Outcome perturbation_validity(const testing::PreparedFixture& fx, const std::vector<ClaimRecord>& claims) {
  std::size_t n_false = 0, bad = 0;
  std::string first;
  for (const auto& c : claims) {
    if (c.label) continue;
    ++n_false;
    const auto& sample = *fx.by_id.at(c.sample_id);
    const auto parsed = parse_template(c.text);
    const auto families = applicable_families(c.claim_type);
    const bool ok = parsed && c.perturbation &&
                    std::find(families.begin(), families.end(), c.perturbation->family) != families.end() &&
                    parsed->country == payload_country(sample.payload) &&
                    differs_in_field(*parsed, sample, c.perturbation->family);
    if (!ok) {
      ++bad;
      if (first.empty()) first = c.claim_id + ": " + c.text;
    }
  }
  std::size_t involution_failures = 0;
  for (const char* token : {"top", "bottom", "increase", "decrease", "highest", "lowest"}) {
    const std::string once = perturb_binary(std::string(token));
    if (once == token || perturb_binary(once) != token) ++involution_failures;
  }
  for (Direction d : {Direction::Top, Direction::Bottom, Direction::Increase, Direction::Decrease, Direction::Highest,
                      Direction::Lowest}) {
    if (perturb_binary(d) == d || perturb_binary(perturb_binary(d)) != d) ++involution_failures;
  }
  std::ostringstream d;
  d << n_false - bad << "/" << n_false << " false claims differ from gold in the perturbed field; "
    << "binary inversion involution failures " << involution_failures << "/12";
  if (!first.empty()) d << "; first: " << first;
  return {n_false > 0 && bad == 0 && involution_failures == 0, d.str()};
}

// ---------------------------------------------------------------- 8

Outcome split_integrity() {
  std::size_t failures = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(derive_seed(77, "split-claims|" + std::to_string(seed)));
    const int n_tables = rng.between(2, 80);
    const int n_claims = rng.between(n_tables, 10 * n_tables);
    std::vector<ClaimRecord> claims;
    for (int i = 0; i < n_claims; ++i) {
      ClaimRecord c;
      c.claim_id = "c" + std::to_string(i);
      const double u = rng.unit();
      const int n = u < 0.02 ? 0 : u < 0.05 ? 2 : 1;
      for (int k = 0; k < n; ++k) c.table_ids.push_back("T" + std::to_string(rng.between(0, n_tables - 1)));
      claims.push_back(std::move(c));
    }
    // Make sure every table has at least one claim.
    for (int t = 0; t < n_tables; ++t) {
      ClaimRecord c;
      c.claim_id = "t" + std::to_string(t);
      c.table_ids = {"T" + std::to_string(t)};
      claims.push_back(std::move(c));
    }
    const auto m = split(claims, seed);

    std::vector<std::string> problems;
    std::set<std::string> train(m.train_claim_ids.begin(), m.train_claim_ids.end());
    std::set<std::string> test(m.test_claim_ids.begin(), m.test_claim_ids.end());
    std::set<std::string> discarded(m.discarded_claim_ids.begin(), m.discarded_claim_ids.end());
    if (train.size() + test.size() + discarded.size() != claims.size()) problems.push_back("not a partition");
    std::set<std::string> train_tables, test_tables;
    for (const auto& c : claims) {
      const int where = (train.count(c.claim_id) ? 1 : 0) + (test.count(c.claim_id) ? 1 : 0) +
                        (discarded.count(c.claim_id) ? 1 : 0);
      if (where != 1) problems.push_back("claim in " + std::to_string(where) + " parts");
      if (c.table_ids.size() != 1 && !discarded.count(c.claim_id)) problems.push_back("multi-table claim kept");
      if (c.table_ids.size() != 1) continue;
      const bool held = m.holdout_tables.count(c.table_ids[0]) > 0;
      if (train.count(c.claim_id)) {
        train_tables.insert(c.table_ids[0]);
        if (held) problems.push_back("train claim on holdout table");
      }
      if (test.count(c.claim_id)) {
        test_tables.insert(c.table_ids[0]);
        if (!held) problems.push_back("test claim off holdout");
      }
    }
    for (const auto& t : train_tables) {
      if (test_tables.count(t)) problems.push_back("table overlap");
    }
    if (static_cast<double>(m.holdout_tables.size()) < 0.10 * n_tables) problems.push_back("holdout under 10%");
    if (!problems.empty()) {
      ++failures;
      if (first.empty()) first = "seed " + std::to_string(seed) + ": " + problems.front();
    }
  }
  std::string d = std::to_string(1000 - failures) + "/1000 seeds keep disjoint tables, a >=10% holdout and an exact "
                                                   "partition";
  if (!first.empty()) d += "; first: " + first;
  return {failures == 0, d};
}

// ---------------------------------------------------------------- 9

Outcome determinism(const std::filesystem::path& dir) {
  PipelineConfig c;
  c.seed = 42;
  c.verify.lossy_fraction = 0.3;
  c.verify.claims = "all";
  c.verify.max_claims = 600;
  std::vector<std::string> hashes[2];
  const char* files[] = {"claims.jsonl", "traces.jsonl", "report.json"};
  for (int run = 0; run < 2; ++run) {
    c.out_dir = dir / ("determinism" + std::to_string(run));
    c.threads = run == 0 ? 1 : 6;
    run_pipeline(c);
    for (const char* f : files) hashes[run].push_back(testing::read_text(c.out_dir / f));
  }
  std::ostringstream d;
  bool ok = true;
  for (std::size_t i = 0; i < std::size(files); ++i) {
    const bool same = hashes[0][i] == hashes[1][i] && !hashes[0][i].empty();
    ok = ok && same;
    d << files[i] << (same ? " identical" : " DIFFERS") << " (" << hashes[0][i].size() << " bytes)"
      << (i + 1 < std::size(files) ? ", " : "");
  }
  d << "; runs used 1 and 6 threads";
  return {ok, d.str()};
}

// ---------------------------------------------------------------- 10

Outcome tolerance_monotonicity() {
  std::size_t failures = 0;
  for (int set = 0; set < 1000; ++set) {
    Rng rng(derive_seed(10, "tolerance|" + std::to_string(set)));
    std::vector<MaskedPair> pairs(static_cast<std::size_t>(rng.between(1, 200)));
    for (auto& p : pairs) {
      const double u = rng.unit();
      p.truth = u < 0.05 ? 0.0 : u < 0.1 ? -100.0 * rng.unit() : 1e3 * rng.unit();
      const double spread = std::exp(3.0 * (rng.unit() - 0.5));
      p.prediction = rng.unit() < 0.1 ? p.truth : p.truth * spread;
    }
    std::vector<double> ps{0.0};
    for (int i = rng.between(1, 12); i > 0; --i) ps.push_back(3.0 * rng.unit());
    const auto curve = tolerance_curve(pairs, ps);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      if (curve.points[i].first < curve.points[i - 1].first ||
          curve.points[i].second < curve.points[i - 1].second) {
        ++failures;
        break;
      }
    }
  }
  return {failures == 0, std::to_string(1000 - failures) + "/1000 random prediction sets nondecreasing in p"};
}

}  // namespace

int main() {
  TempDir dir("statclaim-acceptance");
  int failed = 0;
  auto report = [&](int n, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << n << ". " << name << ": " << o.detail << std::endl;
  };

  report(1, "extractor oracle equivalence", extractor_oracle_equivalence);
  report(2, "threshold conformance", [&] { return threshold_conformance(dir.path()); });
  report(3, "masked-fact arithmetic", [&] { return masked_fact_arithmetic(dir.path()); });
  report(4, "confusion-matrix reproduction", confusion_reproduction);

  FixtureConfig fc;  // the default fixture: 6 tables, 30 countries, 20 years
  const auto fx = testing::prepare_fixture(fc, dir / "fixture");
  const auto claims = testing::fixture_claims(fx, 5);
  const auto chosen = pick_pairs(claims, 100);
  report(5, "gold-oracle end-to-end", [&] { return gold_oracle_end_to_end(fx, chosen); });
  report(6, "degradation ordering", [&] { return degradation_ordering(fx, chosen); });
  report(7, "perturbation validity", [&] { return perturbation_validity(fx, claims); });
  report(8, "split integrity", split_integrity);
  report(9, "determinism", [&] { return determinism(dir.path()); });
  report(10, "tolerance-curve monotonicity", tolerance_monotonicity);

  std::cout << (failed == 0 ? "all 10 criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
