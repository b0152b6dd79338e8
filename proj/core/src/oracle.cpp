#include "statclaim/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace statclaim::oracle {

namespace {

struct Obs {
  std::string country;
  int year;
  double value;
};

std::vector<Obs> observations(const MeasureSlice& slice) {
  std::vector<Obs> out;
  for (const auto& r : slice.rows) out.push_back({r.reference_area, r.year, *r.obs_value});
  return out;
}

std::vector<Obs> in_year(const std::vector<Obs>& all, int year) {
  std::vector<Obs> out;
  for (const auto& o : all) {
    if (o.year == year) out.push_back(o);
  }
  return out;
}

std::set<int> years_of(const std::vector<Obs>& all) {
  std::set<int> out;
  for (const auto& o : all) out.insert(o.year);
  return out;
}

std::set<std::string> countries_of(const std::vector<Obs>& all) {
  std::set<std::string> out;
  for (const auto& o : all) out.insert(o.country);
  return out;
}

/// 1 + number of countries that sort strictly ahead in the same year.
int rank_of(const std::vector<Obs>& year_obs, const std::string& country) {
  double mine = 0;
  for (const auto& o : year_obs) {
    if (o.country == country) mine = o.value;
  }
  int ahead = 0;
  for (const auto& o : year_obs) {
    if (o.value > mine || (o.value == mine && o.country < country)) ++ahead;
  }
  return ahead + 1;
}

std::vector<EvidenceRow> evidence_for_year(const std::vector<Obs>& year_obs) {
  std::vector<EvidenceRow> out;
  for (const auto& o : year_obs) out.push_back({o.country, o.year, o.value});
  return out;
}

std::vector<SeriesPoint> series_for(const std::vector<Obs>& all, const std::string& country) {
  std::vector<SeriesPoint> out;
  for (const auto& o : all) {
    if (o.country == country) out.push_back({o.year, o.value});
  }
  std::sort(out.begin(), out.end());
  return out;
}

int ceil_threshold(double fraction, int n) {
  int t = 0;
  while (t < fraction * n - 1e-9) ++t;
  return t;
}

bool substantial(int ra, int rb, int n_a, const ExtractConfig& c) {
  const int flat = ra > rb ? ra - rb : rb - ra;
  if (flat >= std::max(c.rank_shift_min_positions, ceil_threshold(c.rank_shift_fraction, n_a))) {
    return true;
  }
  const int lo = std::min(ra, rb), hi = std::max(ra, rb);
  return hi >= c.rank_ratio * lo;
}

}  // namespace

std::vector<DataSample> top_k(const MeasureSlice& slice, const ExtractConfig& config) {
  const auto all = observations(slice);
  std::vector<DataSample> out;
  for (int year : years_of(all)) {
    const auto obs = in_year(all, year);
    const int n = static_cast<int>(obs.size());
    if (n < config.top_k_min_countries) continue;
    const int k = n > config.top_k_large_above ? config.k_large : config.k_small;
    for (const auto& o : obs) {
      const int r = rank_of(obs, o.country);
      if (r <= k) {
        out.push_back(make_sample(slice.table_id, slice.combination,
                                  TopKPayload{o.country, year, k, Direction::Top, r, o.value, n},
                                  evidence_for_year(obs)));
      }
      const int from_bottom = n - r + 1;
      if (from_bottom <= k) {
        out.push_back(make_sample(
            slice.table_id, slice.combination,
            TopKPayload{o.country, year, k, Direction::Bottom, from_bottom, o.value, n},
            evidence_for_year(obs)));
      }
    }
  }
  return out;
}

std::vector<DataSample> constant_change(const MeasureSlice& slice, const ExtractConfig& config) {
  const auto all = observations(slice);
  std::vector<DataSample> out;
  for (const auto& country : countries_of(all)) {
    const auto pts = series_for(all, country);
    const int n = static_cast<int>(pts.size());
    for (Direction dir : {Direction::Increase, Direction::Decrease}) {
      auto step_ok = [&](int i) {  // step from i to i+1
        if (pts[i + 1].year != pts[i].year + 1) return false;
        return dir == Direction::Increase ? pts[i + 1].value > pts[i].value
                                          : pts[i + 1].value < pts[i].value;
      };
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          bool monotone = true;
          for (int s = i; s < j; ++s) monotone = monotone && step_ok(s);
          if (!monotone) continue;
          const bool left_max = i == 0 || !step_ok(i - 1);
          const bool right_max = j == n - 1 || !step_ok(j);
          const int years = pts[j].year - pts[i].year + 1;
          if (!left_max || !right_max || years < config.min_run_years) continue;
          std::vector<EvidenceRow> ev;
          for (int s = i; s <= j; ++s) ev.push_back({country, pts[s].year, pts[s].value});
          out.push_back(make_sample(slice.table_id, slice.combination,
                                    ConstantChangePayload{country, dir, years, pts[i], pts[j]}, ev));
        }
      }
    }
  }
  return out;
}

std::vector<DataSample> historical_extreme(const MeasureSlice& slice, const ExtractConfig& config) {
  const auto all = observations(slice);
  std::vector<DataSample> out;
  for (const auto& country : countries_of(all)) {
    const auto pts = series_for(all, country);
    if (pts.empty()) continue;
    const int first_year = pts.front().year;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (Direction dir : {Direction::Highest, Direction::Lowest}) {
        const double v = pts[i].value;
        // Latest earlier point at least as extreme.
        int latest = -1;
        for (std::size_t j = 0; j < i; ++j) {
          const bool rivals = dir == Direction::Highest ? pts[j].value >= v : pts[j].value <= v;
          if (rivals) latest = static_cast<int>(j);
        }
        int n_years = 0;
        if (latest < 0) {
          if (i == 0) continue;
          n_years = pts[i].year - first_year;
        } else {
          if (pts[static_cast<std::size_t>(latest)].value == v) continue;
          n_years = pts[i].year - pts[static_cast<std::size_t>(latest)].year;
        }
        if (n_years < config.min_extreme_years) continue;
        std::vector<EvidenceRow> ev;
        for (const auto& p : pts) {
          if (p.year >= pts[i].year - n_years && p.year <= pts[i].year) {
            ev.push_back({country, p.year, p.value});
          }
        }
        out.push_back(make_sample(slice.table_id, slice.combination,
                                  HistoricalExtremePayload{country, pts[i].year, v, dir, n_years},
                                  ev));
      }
    }
  }
  return out;
}

std::vector<DataSample> rank_shifts(const MeasureSlice& slice, const ExtractConfig& config) {
  const auto all = observations(slice);
  const auto years = years_of(all);
  std::map<int, std::vector<Obs>> by_year;
  for (int y : years) by_year[y] = in_year(all, y);
  std::vector<DataSample> out;
  for (const auto& country : countries_of(all)) {
    std::vector<ChangeInRankPayload> qualifying;
    for (int ya : years) {
      for (int yb : years) {
        if (ya >= yb) continue;
        const auto& oa = by_year[ya];
        const auto& ob = by_year[yb];
        const auto has = [&](const std::vector<Obs>& v) {
          return std::any_of(v.begin(), v.end(), [&](const Obs& o) { return o.country == country; });
        };
        if (!has(oa) || !has(ob)) continue;
        ChangeInRankPayload p;
        p.country = country;
        p.year_a = ya;
        p.year_b = yb;
        p.rank_a = rank_of(oa, country);
        p.rank_b = rank_of(ob, country);
        p.n_countries_a = static_cast<int>(oa.size());
        p.n_countries_b = static_cast<int>(ob.size());
        for (const auto& o : oa) if (o.country == country) p.value_a = o.value;
        for (const auto& o : ob) if (o.country == country) p.value_b = o.value;
        if (substantial(p.rank_a, p.rank_b, p.n_countries_a, config)) qualifying.push_back(p);
      }
    }
    if (qualifying.empty()) continue;
    std::sort(qualifying.begin(), qualifying.end(),
              [](const ChangeInRankPayload& a, const ChangeInRankPayload& b) {
                const int da = std::abs(a.rank_a - a.rank_b), db = std::abs(b.rank_a - b.rank_b);
                if (da != db) return da > db;
                const int sa = a.year_b - a.year_a, sb = b.year_b - b.year_a;
                if (sa != sb) return sa > sb;
                return a.year_a < b.year_a;
              });
    const auto& best = qualifying.front();
    auto ev = evidence_for_year(in_year(all, best.year_a));
    auto ev_b = evidence_for_year(in_year(all, best.year_b));
    ev.insert(ev.end(), ev_b.begin(), ev_b.end());
    out.push_back(make_sample(slice.table_id, slice.combination, best, ev));
  }
  return out;
}

std::vector<DataSample> change_over_time(const MeasureSlice& slice, const ExtractConfig& config) {
  std::vector<DataSample> out;
  for (const auto& s : rank_shifts(slice, config)) {
    const auto& r = std::get<ChangeInRankPayload>(s.payload);
    out.push_back(make_sample(slice.table_id, slice.combination,
                              ChangeOverTimePayload{r.country, r.year_a, r.year_b, r.value_a, r.value_b},
                              {{r.country, r.year_a, r.value_a}, {r.country, r.year_b, r.value_b}}));
  }
  return out;
}

std::vector<DataSample> have_trait(const MeasureSlice& slice, const ExtractConfig& config) {
  std::set<std::tuple<std::string, int, double>> endpoints;
  for (const auto& s : rank_shifts(slice, config)) {
    const auto& r = std::get<ChangeInRankPayload>(s.payload);
    endpoints.insert({r.country, r.year_a, r.value_a});
    endpoints.insert({r.country, r.year_b, r.value_b});
  }
  std::vector<DataSample> out;
  for (const auto& [country, year, value] : endpoints) {
    out.push_back(make_sample(slice.table_id, slice.combination, HaveTraitPayload{country, year, value},
                              {{country, year, value}}));
  }
  return out;
}

std::vector<DataSample> extract_all(const MeasureSlice& slice, const ExtractConfig& config) {
  std::vector<DataSample> out;
  for (auto part : {top_k(slice, config), constant_change(slice, config),
                    historical_extreme(slice, config), rank_shifts(slice, config),
                    change_over_time(slice, config), have_trait(slice, config)}) {
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end(),
            [](const DataSample& a, const DataSample& b) { return a.sample_id < b.sample_id; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const DataSample& a, const DataSample& b) { return a.sample_id == b.sample_id; }),
            out.end());
  return out;
}

}  // namespace statclaim::oracle
