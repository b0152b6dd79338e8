#include "statclaim/extract.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "statclaim/hashing.hpp"
#include "statclaim/serialize.hpp"

namespace statclaim {

std::string_view to_string(ClaimType type) noexcept {
  switch (type) {
    case ClaimType::TopK: return "TopK";
    case ClaimType::ConstantChange: return "ConstantChange";
    case ClaimType::HistoricalExtreme: return "HistoricalExtreme";
    case ClaimType::ChangeInRank: return "ChangeInRank";
    case ClaimType::ChangeOverTime: return "ChangeOverTime";
    case ClaimType::HaveTrait: return "HaveTrait";
  }
  return "HaveTrait";
}

std::optional<ClaimType> parse_claim_type(std::string_view text) noexcept {
  for (auto t : kAllClaimTypes) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Top: return "top";
    case Direction::Bottom: return "bottom";
    case Direction::Increase: return "increase";
    case Direction::Decrease: return "decrease";
    case Direction::Highest: return "highest";
    case Direction::Lowest: return "lowest";
  }
  return "top";
}

std::optional<Direction> parse_direction(std::string_view text) noexcept {
  for (auto d : {Direction::Top, Direction::Bottom, Direction::Increase, Direction::Decrease,
                 Direction::Highest, Direction::Lowest}) {
    if (to_string(d) == text) return d;
  }
  return std::nullopt;
}

ClaimType claim_type_of(const Payload& payload) noexcept {
  return static_cast<ClaimType>(payload.index());
}

const std::string& payload_country(const Payload& payload) noexcept {
  return std::visit([](const auto& p) -> const std::string& { return p.country; }, payload);
}

DataSample make_sample(std::string table_id, MeasureCombination combination, Payload payload,
                       std::vector<EvidenceRow> evidence) {
  DataSample s;
  s.claim_type = claim_type_of(payload);
  s.table_id = std::move(table_id);
  s.combination = std::move(combination);
  s.payload = std::move(payload);
  std::sort(evidence.begin(), evidence.end());
  s.evidence_rows = std::move(evidence);
  const nlohmann::json identity{{"claim_type", to_string(s.claim_type)},
                                {"table_id", s.table_id},
                                {"combination", to_json(s.combination)},
                                {"payload", payload_to_json(s.payload)}};
  s.sample_id = short_hash(identity.dump());
  return s;
}

std::vector<CountrySeries> build_series(const MeasureSlice& slice) {
  std::map<std::string, std::vector<SeriesPoint>> by_country;
  for (const auto& r : slice.rows) by_country[r.reference_area].push_back({r.year, *r.obs_value});
  std::vector<CountrySeries> out;
  out.reserve(by_country.size());
  for (auto& [country, points] : by_country) {
    std::sort(points.begin(), points.end());
    out.push_back({country, std::move(points)});
  }
  return out;
}

namespace {

/// year -> ranked entries, using the same ordering as rank_year.
std::map<int, std::vector<RankedEntry>> rank_all_years(const MeasureSlice& slice) {
  std::map<int, std::vector<RankedEntry>> years;
  for (const auto& r : slice.rows) years[r.year].push_back({r.reference_area, *r.obs_value, 0});
  for (auto& [year, entries] : years) {
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
      if (a.value != b.value) return a.value > b.value;
      return a.country < b.country;
    });
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = static_cast<int>(i) + 1;
  }
  return years;
}

std::vector<EvidenceRow> year_evidence(const std::vector<RankedEntry>& entries, int year) {
  std::vector<EvidenceRow> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({e.country, year, e.value});
  return out;
}

}  // namespace

std::vector<RankedEntry> rank_year(const MeasureSlice& slice, int year) {
  auto all = rank_all_years(slice);
  auto it = all.find(year);
  return it == all.end() ? std::vector<RankedEntry>{} : it->second;
}

std::vector<DataSample> extract_top_k(const MeasureSlice& slice, const ExtractConfig& config) {
  std::vector<DataSample> out;
  for (const auto& [year, entries] : rank_all_years(slice)) {
    const int n = static_cast<int>(entries.size());
    if (n < config.top_k_min_countries) continue;
    const int k = n > config.top_k_large_above ? config.k_large : config.k_small;
    const auto evidence = year_evidence(entries, year);
    for (int i = 0; i < k; ++i) {
      const auto& top = entries[static_cast<std::size_t>(i)];
      out.push_back(make_sample(slice.table_id, slice.combination,
                                TopKPayload{top.country, year, k, Direction::Top, i + 1, top.value, n},
                                evidence));
      const auto& bottom = entries[static_cast<std::size_t>(n - 1 - i)];
      out.push_back(make_sample(
          slice.table_id, slice.combination,
          TopKPayload{bottom.country, year, k, Direction::Bottom, i + 1, bottom.value, n}, evidence));
    }
  }
  return out;
}

std::vector<DataSample> extract_constant_change(const CountrySeries& series,
                                                const SliceContext& ctx,
                                                const ExtractConfig& config) {
  std::vector<DataSample> out;
  const auto& pts = series.points;
  const std::size_t n = pts.size();
  if (n == 0) return out;

  for (int sign : {+1, -1}) {
    auto emit = [&](std::size_t first, std::size_t last) {
      const int years = static_cast<int>(last - first) + 1;
      if (years < config.min_run_years) return;
      std::vector<EvidenceRow> evidence;
      for (std::size_t i = first; i <= last; ++i) {
        evidence.push_back({series.reference_area, pts[i].year, pts[i].value});
      }
      out.push_back(make_sample(
          ctx.table_id, ctx.combination,
          ConstantChangePayload{series.reference_area,
                                sign > 0 ? Direction::Increase : Direction::Decrease, years,
                                pts[first], pts[last]},
          std::move(evidence)));
    };
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const bool consecutive = pts[i].year == pts[i - 1].year + 1;
      const bool moves = sign > 0 ? pts[i].value > pts[i - 1].value : pts[i].value < pts[i - 1].value;
      if (!(consecutive && moves)) {
        emit(start, i - 1);
        start = i;
      }
    }
    emit(start, n - 1);
  }
  return out;
}

std::vector<DataSample> extract_historical_extreme(const CountrySeries& series,
                                                   const SliceContext& ctx,
                                                   const ExtractConfig& config) {
  std::vector<DataSample> out;
  const auto& pts = series.points;
  if (pts.empty()) return out;
  const int first_year = pts.front().year;

  for (Direction dir : {Direction::Highest, Direction::Lowest}) {
    // Monotone stack of indices: the nearest earlier point that ties or beats
    // the current value sits on top after popping the ones it dominates.
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double v = pts[i].value;
      auto beaten = [&](std::size_t j) {
        return dir == Direction::Highest ? pts[j].value < v : pts[j].value > v;
      };
      while (!stack.empty() && beaten(stack.back())) stack.pop_back();

      std::optional<int> n_years;
      if (stack.empty()) {
        if (i > 0) n_years = pts[i].year - first_year;
      } else if (pts[stack.back()].value != v) {
        n_years = pts[i].year - pts[stack.back()].year;
      }
      stack.push_back(i);

      if (!n_years || *n_years < config.min_extreme_years) continue;
      std::vector<EvidenceRow> evidence;
      for (const auto& p : pts) {
        if (p.year >= pts[i].year - *n_years && p.year <= pts[i].year) {
          evidence.push_back({series.reference_area, p.year, p.value});
        }
      }
      out.push_back(make_sample(
          ctx.table_id, ctx.combination,
          HistoricalExtremePayload{series.reference_area, pts[i].year, v, dir, *n_years},
          std::move(evidence)));
    }
  }
  return out;
}

bool is_substantial_rank_shift(int rank_a, int rank_b, int n_countries_a,
                               const ExtractConfig& config) {
  const int flat = std::abs(rank_a - rank_b);
  const int needed = std::max(config.rank_shift_min_positions,
                              static_cast<int>(std::ceil(config.rank_shift_fraction * n_countries_a -
                                                         1e-9)));
  if (flat >= needed) return true;
  const int lo = std::min(rank_a, rank_b);
  const int hi = std::max(rank_a, rank_b);
  return lo > 0 && static_cast<double>(hi) / lo >= config.rank_ratio;
}

std::vector<DataSample> extract_rank_shifts(const MeasureSlice& slice, const ExtractConfig& config) {
  const auto ranked = rank_all_years(slice);
  struct Position {
    int year;
    int rank;
    double value;
    int n;
  };
  std::map<std::string, std::vector<Position>> by_country;
  for (const auto& [year, entries] : ranked) {
    for (const auto& e : entries) {
      by_country[e.country].push_back({year, e.rank, e.value, static_cast<int>(entries.size())});
    }
  }

  std::vector<DataSample> out;
  for (const auto& [country, positions] : by_country) {
    const Position* best_a = nullptr;
    const Position* best_b = nullptr;
    int best_delta = -1;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      for (std::size_t j = i + 1; j < positions.size(); ++j) {
        const auto& a = positions[i];
        const auto& b = positions[j];
        if (!is_substantial_rank_shift(a.rank, b.rank, a.n, config)) continue;
        const int delta = std::abs(a.rank - b.rank);
        bool better = delta > best_delta;
        if (!better && delta == best_delta) {
          const int span = b.year - a.year;
          const int best_span = best_b->year - best_a->year;
          better = span > best_span || (span == best_span && a.year < best_a->year);
        }
        if (better) {
          best_delta = delta;
          best_a = &a;
          best_b = &b;
        }
      }
    }
    if (!best_a) continue;
    auto evidence = year_evidence(ranked.at(best_a->year), best_a->year);
    auto more = year_evidence(ranked.at(best_b->year), best_b->year);
    evidence.insert(evidence.end(), more.begin(), more.end());
    out.push_back(make_sample(slice.table_id, slice.combination,
                              ChangeInRankPayload{country, best_a->year, best_b->year, best_a->rank,
                                                  best_b->rank, best_a->n, best_b->n, best_a->value,
                                                  best_b->value},
                              std::move(evidence)));
  }
  return out;
}

std::vector<DataSample> derive_change_over_time(const std::vector<DataSample>& rank_samples) {
  std::vector<DataSample> out;
  out.reserve(rank_samples.size());
  for (const auto& s : rank_samples) {
    const auto& r = std::get<ChangeInRankPayload>(s.payload);
    out.push_back(make_sample(
        s.table_id, s.combination,
        ChangeOverTimePayload{r.country, r.year_a, r.year_b, r.value_a, r.value_b},
        {{r.country, r.year_a, r.value_a}, {r.country, r.year_b, r.value_b}}));
  }
  return out;
}

std::vector<DataSample> derive_have_trait(const std::vector<DataSample>& rank_samples,
                                          const std::vector<DataSample>& cot_samples) {
  std::map<std::string, DataSample> unique;
  auto add = [&](const DataSample& parent, const std::string& country, int year, double value) {
    auto s = make_sample(parent.table_id, parent.combination, HaveTraitPayload{country, year, value},
                         {{country, year, value}});
    unique.emplace(s.sample_id, std::move(s));
  };
  for (const auto& s : rank_samples) {
    const auto& r = std::get<ChangeInRankPayload>(s.payload);
    add(s, r.country, r.year_a, r.value_a);
    add(s, r.country, r.year_b, r.value_b);
  }
  for (const auto& s : cot_samples) {
    const auto& c = std::get<ChangeOverTimePayload>(s.payload);
    add(s, c.country, c.year_a, c.value_a);
    add(s, c.country, c.year_b, c.value_b);
  }
  std::vector<DataSample> out;
  out.reserve(unique.size());
  for (auto& [id, s] : unique) out.push_back(std::move(s));
  return out;
}

ExtractionBatch extract_all(const MeasureSlice& slice, const ExtractConfig& config) {
  std::vector<ExtractionBatch> parts(1);
  auto& samples = parts.front().samples;
  auto append = [&](std::vector<DataSample> more) {
    samples.insert(samples.end(), std::make_move_iterator(more.begin()),
                   std::make_move_iterator(more.end()));
  };
  append(extract_top_k(slice, config));
  const SliceContext ctx{slice.table_id, slice.combination};
  for (const auto& series : build_series(slice)) {
    append(extract_constant_change(series, ctx, config));
    append(extract_historical_extreme(series, ctx, config));
  }
  auto ranks = extract_rank_shifts(slice, config);
  auto cot = derive_change_over_time(ranks);
  auto traits = derive_have_trait(ranks, cot);
  append(std::move(ranks));
  append(std::move(cot));
  append(std::move(traits));
  return merge_batches(std::move(parts));
}

ExtractionBatch merge_batches(std::vector<ExtractionBatch> batches) {
  ExtractionBatch out;
  for (auto& b : batches) {
    out.samples.insert(out.samples.end(), std::make_move_iterator(b.samples.begin()),
                       std::make_move_iterator(b.samples.end()));
  }
  std::sort(out.samples.begin(), out.samples.end(),
            [](const DataSample& a, const DataSample& b) { return a.sample_id < b.sample_id; });
  out.samples.erase(std::unique(out.samples.begin(), out.samples.end(),
                                [](const DataSample& a, const DataSample& b) {
                                  return a.sample_id == b.sample_id;
                                }),
                    out.samples.end());
  return out;
}

std::vector<std::string> check_sample_invariants(const DataSample& sample,
                                                 const ExtractConfig& config,
                                                 const TimeWindow* window) {
  std::vector<std::string> v;
  auto in_window = [&](int year) { return !window || window->contains(year); };
  if (claim_type_of(sample.payload) != sample.claim_type) v.push_back("claim_type/payload mismatch");

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TopKPayload>) {
          if (p.rank < 1 || p.rank > p.k) v.push_back("TopK rank outside [1,k]");
          if (p.n_countries < config.top_k_min_countries) v.push_back("TopK with too few countries");
          const int expected_k = p.n_countries > config.top_k_large_above ? config.k_large : config.k_small;
          if (p.k != expected_k) v.push_back("TopK k does not follow the country-count rule");
          if (p.direction != Direction::Top && p.direction != Direction::Bottom) {
            v.push_back("TopK direction");
          }
          if (!in_window(p.year)) v.push_back("TopK year outside window");
        } else if constexpr (std::is_same_v<T, ConstantChangePayload>) {
          if (p.n_years < config.min_run_years) v.push_back("ConstantChange run too short");
          if (p.end.year - p.start.year + 1 != p.n_years) v.push_back("ConstantChange span/n_years");
          const bool up = p.end.value > p.start.value;
          if ((p.direction == Direction::Increase) != up) v.push_back("ConstantChange direction");
          if (!in_window(p.start.year) || !in_window(p.end.year)) {
            v.push_back("ConstantChange outside window");
          }
        } else if constexpr (std::is_same_v<T, HistoricalExtremePayload>) {
          if (p.n_years < config.min_extreme_years) v.push_back("HistoricalExtreme N too small");
          if (!in_window(p.year)) v.push_back("HistoricalExtreme year outside window");
        } else if constexpr (std::is_same_v<T, ChangeInRankPayload>) {
          if (p.year_a >= p.year_b) v.push_back("ChangeInRank years not ordered");
          if (!is_substantial_rank_shift(p.rank_a, p.rank_b, p.n_countries_a, config)) {
            v.push_back("ChangeInRank shift not substantial");
          }
          if (p.rank_a < 1 || p.rank_a > p.n_countries_a || p.rank_b < 1 || p.rank_b > p.n_countries_b) {
            v.push_back("ChangeInRank rank out of range");
          }
          if (!in_window(p.year_a) || !in_window(p.year_b)) v.push_back("ChangeInRank outside window");
        } else if constexpr (std::is_same_v<T, ChangeOverTimePayload>) {
          if (p.year_a >= p.year_b) v.push_back("ChangeOverTime years not ordered");
          if (!in_window(p.year_a) || !in_window(p.year_b)) v.push_back("ChangeOverTime outside window");
        } else {
          if (!in_window(p.year)) v.push_back("HaveTrait outside window");
        }
      },
      sample.payload);
  return v;
}

}  // namespace statclaim
