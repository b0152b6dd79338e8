#include "statclaim/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "statclaim/error.hpp"

namespace statclaim {

using nlohmann::json;

CleanedView clean_rows(const SourceTable& table, std::vector<ObservationRow> rows,
                       const std::string& normal_status) {
  if (!table.first_with_role(ColumnRole::ReferenceArea)) {
    throw Error(ErrorCode::NoReferenceArea, table.table_id);
  }
  CleanedView view;
  view.report.input_rows = rows.size();
  view.table = table;
  std::erase_if(view.table.columns, [](const ColumnSpec& c) {
    return c.role == ColumnRole::Metadata || c.role == ColumnRole::MeasureIdentifier;
  });

  // Measure columns that never hold a value are dropped outright.
  std::set<std::string> populated;
  for (const auto& r : rows) {
    for (const auto& [col, value] : r.measure_values) {
      if (!value.empty()) populated.insert(col);
    }
  }
  std::erase_if(view.table.columns, [&](const ColumnSpec& c) {
    const bool empty = c.role == ColumnRole::Measure && !populated.count(c.name);
    if (empty) view.report.dropped_columns.push_back(c.name);
    return empty;
  });
  view.measure_columns = view.table.measure_columns();

  for (auto& r : rows) {
    if (!r.obs_value) {
      ++view.report.dropped_null_value;
      continue;
    }
    if (r.status != normal_status) {
      ++view.report.dropped_status;
      continue;
    }
    bool keyed = !r.reference_area.empty();
    for (const auto& col : view.measure_columns) {
      auto it = r.measure_values.find(col);
      if (it == r.measure_values.end() || it->second.empty()) keyed = false;
    }
    if (!keyed) {
      ++view.report.dropped_null_key;
      continue;
    }
    std::erase_if(r.measure_values, [&](const auto& kv) {
      return std::find(view.measure_columns.begin(), view.measure_columns.end(), kv.first) ==
             view.measure_columns.end();
    });
    view.rows.push_back(std::move(r));
  }
  view.table.row_count = view.rows.size();
  return view;
}

CleanedView clean_table(const TableStore& store, const std::string& table_id) {
  return clean_rows(store.table(table_id), store.rows(table_id), store.config().normal_status);
}

CleanedView clean_view(const CleanedView& view, const std::string& normal_status) {
  return clean_rows(view.table, view.rows, normal_status);
}

std::map<int, int> year_coverage(const std::vector<ObservationRow>& rows) {
  std::map<int, std::set<std::string>> areas;
  for (const auto& r : rows) areas[r.year].insert(r.reference_area);
  std::map<int, int> out;
  for (const auto& [year, set] : areas) out[year] = static_cast<int>(set.size());
  return out;
}

TimeWindow ideal_time_window(const std::map<int, int>& coverage, const WindowConfig& config) {
  int max_coverage = 0;
  for (const auto& [year, n] : coverage) max_coverage = std::max(max_coverage, n);
  if (max_coverage < config.min_countries) {
    throw Error(ErrorCode::NoValidWindow, "peak coverage " + std::to_string(max_coverage) +
                                              " below " + std::to_string(config.min_countries));
  }
  const double threshold = config.coverage_fraction * max_coverage;

  int best_start = 0, best_len = 0;
  int run_start = 0, run_len = 0, prev_year = 0;
  for (const auto& [year, n] : coverage) {
    const bool qualifies = n >= threshold;
    if (!qualifies) {
      run_len = 0;
    } else if (run_len > 0 && year == prev_year + 1) {
      ++run_len;
    } else {
      run_start = year;
      run_len = 1;
    }
    prev_year = year;
    // Later runs win ties because years are visited in increasing order.
    if (run_len > 0 && run_len >= best_len) {
      best_start = run_start;
      best_len = run_len;
    }
  }
  if (best_len < config.min_years) {
    throw Error(ErrorCode::NoValidWindow,
                "longest qualifying run is " + std::to_string(best_len) + " year(s)");
  }
  TimeWindow w;
  w.start_year = best_start;
  w.end_year = best_start + best_len - 1;
  w.max_coverage = max_coverage;
  w.per_year_coverage = coverage;
  return w;
}

TimeWindow ideal_time_window(const CleanedView& view, const WindowConfig& config) {
  return ideal_time_window(year_coverage(view.rows), config);
}

bool MeasureCombination::matches(const ObservationRow& row) const {
  for (const auto& [col, value] : assignments) {
    auto it = row.measure_values.find(col);
    if (it == row.measure_values.end() || it->second != value) return false;
  }
  return true;
}

std::string MeasureCombination::label() const {
  std::string out;
  for (const auto& [col, value] : assignments) {
    if (!out.empty()) out += ", ";
    out += value;
  }
  return out;
}

std::vector<std::pair<MeasureCombination, std::size_t>> enumerate_combinations(
    const CleanedView& view) {
  std::map<std::vector<std::string>, std::size_t> support;
  for (const auto& r : view.rows) {
    std::vector<std::string> key;
    key.reserve(view.measure_columns.size());
    for (const auto& col : view.measure_columns) {
      auto it = r.measure_values.find(col);
      key.push_back(it == r.measure_values.end() ? std::string{} : it->second);
    }
    ++support[key];
  }
  std::vector<std::pair<MeasureCombination, std::size_t>> out;
  if (view.measure_columns.empty()) {
    out.emplace_back(MeasureCombination{}, view.rows.size());
    return out;
  }
  for (const auto& [key, n] : support) {
    MeasureCombination c;
    for (std::size_t i = 0; i < key.size(); ++i) {
      c.assignments.emplace_back(view.measure_columns[i], key[i]);
    }
    out.emplace_back(std::move(c), n);
  }
  return out;
}

std::pair<long, std::string> period_tag_rank(const std::string& tag) {
  if (tag.empty()) return {-1, {}};
  std::size_t end = tag.size();
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(tag[begin - 1]))) --begin;
  long number = 0;
  if (begin < end) number = std::stol(tag.substr(begin, std::min<std::size_t>(end - begin, 9)));
  return {number, tag};
}

MeasureSlice slice(const CleanedView& view, const MeasureCombination& combination,
                   const TimeWindow& window) {
  MeasureSlice out;
  out.table_id = view.table.table_id;
  out.combination = combination;
  out.window = window;

  std::map<std::pair<std::string, int>, const ObservationRow*> chosen;
  for (const auto& r : view.rows) {
    if (!window.contains(r.year) || !combination.matches(r)) continue;
    auto key = std::make_pair(r.reference_area, r.year);
    auto [it, fresh] = chosen.emplace(key, &r);
    if (fresh) continue;
    const ObservationRow& kept = *it->second;
    const auto kept_rank = period_tag_rank(kept.period_tag);
    const auto rank = period_tag_rank(r.period_tag);
    if (rank > kept_rank) {
      it->second = &r;
    } else if (rank == kept_rank) {
      if (kept.obs_value != r.obs_value) {
        out.warnings.push_back("conflicting duplicate for " + r.reference_area + " " +
                               std::to_string(r.year) + "; kept last ingested");
      }
      if (r.ingest_order > kept.ingest_order) it->second = &r;
    }
  }
  out.rows.reserve(chosen.size());
  for (const auto& [key, row] : chosen) out.rows.push_back(*row);
  return out;
}

PreprocessResult preprocess_corpus(const TableStore& store, const WindowConfig& config) {
  PreprocessResult result;
  for (const auto& id : store.table_ids()) {
    TableReport report;
    report.table_id = id;
    try {
      PreparedTable prepared;
      prepared.view = clean_table(store, id);
      report.cleaned_rows = prepared.view.rows.size();
      prepared.window = ideal_time_window(prepared.view, config);
      prepared.combinations = enumerate_combinations(prepared.view);
      report.included = true;
      report.window = prepared.window;
      report.combinations = prepared.combinations.size();
      result.tables.push_back(std::move(prepared));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoReferenceArea && e.code() != ErrorCode::NoValidWindow) throw;
      report.exclusion_reason = std::string(to_string(e.code()));
    }
    result.reports.push_back(std::move(report));
  }
  return result;
}

json to_json(const TimeWindow& window) {
  json cov = json::object();
  for (const auto& [year, n] : window.per_year_coverage) cov[std::to_string(year)] = n;
  return json{{"start_year", window.start_year},
              {"end_year", window.end_year},
              {"max_coverage", window.max_coverage},
              {"per_year_coverage", std::move(cov)}};
}

json to_json(const TableReport& report) {
  json j{{"table_id", report.table_id},
         {"status", report.included ? "ok" : "excluded"},
         {"cleaned_rows", report.cleaned_rows}};
  if (report.included) {
    j["window"] = to_json(*report.window);
    j["combinations"] = report.combinations;
  } else {
    j["reason"] = report.exclusion_reason;
  }
  return j;
}

json to_json(const MeasureCombination& combination) {
  json arr = json::array();
  for (const auto& [col, value] : combination.assignments) arr.push_back(json::array({col, value}));
  return arr;
}

MeasureCombination combination_from_json(const json& j) {
  MeasureCombination c;
  for (const auto& pair : j) {
    c.assignments.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
  }
  return c;
}

}  // namespace statclaim
