#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "statclaim/table_store.hpp"

namespace statclaim {

struct CleaningReport {
  std::size_t input_rows = 0;
  std::size_t dropped_null_value = 0;
  std::size_t dropped_status = 0;
  std::size_t dropped_null_key = 0;
  std::vector<std::string> dropped_columns;
};

/// A table with metadata and identifier columns removed and only usable
/// observations left. `table.columns` lists the surviving columns.
struct CleanedView {
  SourceTable table;
  std::vector<std::string> measure_columns;
  std::vector<ObservationRow> rows;
  CleaningReport report;
};

/// Pure cleaning over already-loaded rows. Throws NoReferenceArea.
CleanedView clean_rows(const SourceTable& table, std::vector<ObservationRow> rows,
                       const std::string& normal_status = "normal");
CleanedView clean_table(const TableStore& store, const std::string& table_id);
/// Cleaning a cleaned view is a no-op on its table, measures and rows.
CleanedView clean_view(const CleanedView& view, const std::string& normal_status = "normal");

struct WindowConfig {
  double coverage_fraction = 0.95;
  int min_countries = 20;
  int min_years = 2;
};

struct TimeWindow {
  int start_year = 0;
  int end_year = 0;
  int max_coverage = 0;
  std::map<int, int> per_year_coverage;

  int length() const { return end_year - start_year + 1; }
  bool contains(int year) const { return year >= start_year && year <= end_year; }
};

/// Distinct reporting areas per year, across all combinations.
std::map<int, int> year_coverage(const std::vector<ObservationRow>& rows);

/// Longest contiguous run of years whose coverage is at least
/// coverage_fraction x the peak coverage; ties go to the most recent run.
/// Throws NoValidWindow when the peak is under min_countries or the best run
/// is shorter than min_years.
TimeWindow ideal_time_window(const std::map<int, int>& coverage, const WindowConfig& config = {});
TimeWindow ideal_time_window(const CleanedView& view, const WindowConfig& config = {});

struct MeasureCombination {
  /// (column, value) in table column order.
  std::vector<std::pair<std::string, std::string>> assignments;

  bool matches(const ObservationRow& row) const;
  /// Values joined with ", "; empty for the degenerate combination.
  std::string label() const;
  auto operator<=>(const MeasureCombination&) const = default;
};

std::vector<std::pair<MeasureCombination, std::size_t>> enumerate_combinations(
    const CleanedView& view);

struct MeasureSlice {
  std::string table_id;
  MeasureCombination combination;
  TimeWindow window;
  /// At most one row per (area, year), sorted by (area, year).
  std::vector<ObservationRow> rows;
  std::vector<std::string> warnings;
};

/// Ordering key for sub-annual tags; untagged rows sort first.
std::pair<long, std::string> period_tag_rank(const std::string& tag);

MeasureSlice slice(const CleanedView& view, const MeasureCombination& combination,
                   const TimeWindow& window);

struct TableReport {
  std::string table_id;
  bool included = false;
  std::string exclusion_reason;
  std::optional<TimeWindow> window;
  std::size_t cleaned_rows = 0;
  std::size_t combinations = 0;
};

struct PreparedTable {
  CleanedView view;
  TimeWindow window;
  std::vector<std::pair<MeasureCombination, std::size_t>> combinations;
};

struct PreprocessResult {
  std::vector<PreparedTable> tables;
  std::vector<TableReport> reports;
};

/// Cleans and windows every table in the store, recording exclusions.
PreprocessResult preprocess_corpus(const TableStore& store, const WindowConfig& config = {});

nlohmann::json to_json(const TableReport& report);
nlohmann::json to_json(const TimeWindow& window);
nlohmann::json to_json(const MeasureCombination& combination);
MeasureCombination combination_from_json(const nlohmann::json& j);

}  // namespace statclaim
