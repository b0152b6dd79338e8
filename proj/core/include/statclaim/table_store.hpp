#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace statclaim {

enum class ColumnRole {
  Metadata,
  Measure,
  MeasureIdentifier,
  ObservationValue,
  ObservationStatus,
  TimePeriod,
  ReferenceArea,
};

enum class ValueKind { Categorical, Numeric, Temporal };

std::string_view to_string(ColumnRole role) noexcept;
std::optional<ColumnRole> parse_column_role(std::string_view text) noexcept;
std::string_view to_string(ValueKind kind) noexcept;

struct ColumnSpec {
  std::string name;
  ColumnRole role = ColumnRole::Measure;
  ValueKind kind = ValueKind::Categorical;
  /// For MeasureIdentifier: the column this one carries codes for.
  std::string identifies;

  bool operator==(const ColumnSpec&) const = default;
};

struct SourceTable {
  std::string table_id;
  std::string name;
  std::string description;
  std::vector<ColumnSpec> columns;
  std::size_t row_count = 0;

  const ColumnSpec* find(std::string_view column_name) const;
  const ColumnSpec* first_with_role(ColumnRole role) const;
  /// Measure-role columns in table order.
  std::vector<std::string> measure_columns() const;
};

/// A year plus an optional sub-annual tag ("Q3", "03", "S1", ...).
struct TimePeriod {
  int year = 0;
  std::string tag;

  std::string to_string() const;
  bool operator==(const TimePeriod&) const = default;
};

/// Throws Error(Parse) unless the text starts with a 4-digit year in
/// [1900, 2100], optionally followed by '-' and a tag.
TimePeriod parse_time_period(std::string_view text);

struct ObservationRow {
  std::string reference_area;
  int year = 0;
  std::string period_tag;
  /// Measure column name -> value; a null cell has no entry.
  std::map<std::string, std::string> measure_values;
  std::optional<double> obs_value;
  std::string status;
  /// 0-based position in the ingested file; breaks ties between duplicates.
  std::int64_t ingest_order = 0;

  bool operator==(const ObservationRow&) const = default;
};

struct StoreConfig {
  std::vector<std::string> metadata_names{"DATAFLOW", "FREQ",      "DECIMALS",       "UNIT_MULT",
                                          "STRUCTURE", "STRUCTURE_ID", "STRUCTURE_NAME", "ACTION"};
  std::string id_suffix = "_ID";
  std::vector<std::string> obs_value_names{"obs_value"};
  std::vector<std::string> status_names{"OBS_STATUS"};
  std::vector<std::string> time_names{"TIME_PERIOD"};
  std::vector<std::string> area_names{"REF_AREA"};
  /// Status assigned to rows with no status column or an empty status cell.
  std::string normal_status = "normal";
  std::size_t max_result_rows = 1000;
};

using RoleHints = std::map<std::string, ColumnRole>;

/// Assigns exactly one role to every header. Deterministic; hints override
/// the name rules unless they contradict the structural constraints, which
/// raises Error(AmbiguousRole).
std::vector<ColumnSpec> classify_columns(const std::vector<std::string>& headers,
                                         const RoleHints& hints = {},
                                         const StoreConfig& config = {});

struct TableMeta {
  std::string table_id;
  std::string name;
  std::string description;
  RoleHints hints;
};

struct UniqueValues {
  std::vector<std::string> values;
  std::size_t total = 0;
};

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;
std::string cell_to_string(const Cell& cell);

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool truncated = false;
};

/// Long-format tables in an embedded SQLite database. Ingestion is
/// single-writer; afterwards the store is only read and the connection is
/// opened in serialized mode so readers may share it across threads.
class TableStore {
 public:
  /// `path` of ":memory:" keeps everything in process.
  explicit TableStore(const std::string& path = ":memory:", StoreConfig config = {});
  ~TableStore();
  TableStore(TableStore&&) noexcept;
  TableStore& operator=(TableStore&&) noexcept;
  TableStore(const TableStore&) = delete;
  TableStore& operator=(const TableStore&) = delete;

  static constexpr std::string_view dialect() { return "SQLite"; }

  SourceTable ingest_table(const std::filesystem::path& path, const TableMeta& meta,
                           bool replace = false);

  std::vector<std::string> table_ids() const;
  bool has_table(std::string_view table_id) const;
  SourceTable table(std::string_view table_id) const;
  std::vector<SourceTable> tables() const;

  /// All rows in ingestion order.
  std::vector<ObservationRow> rows(std::string_view table_id) const;

  UniqueValues unique_values(std::string_view table_id, std::string_view column,
                             std::optional<std::size_t> limit = std::nullopt) const;

  /// Runs one read-only statement. Failures raise SqlSyntaxError or
  /// SqlRejectedWrite; oversized results are truncated, never an error.
  ResultSet run_query(std::string_view sql) const;

  /// Delimited export: columns sorted by name, rows by (area, period).
  void export_table(std::string_view table_id, const std::filesystem::path& path) const;

  /// Digest over the catalog and every stored row.
  std::string checksum() const;

  const StoreConfig& config() const { return config_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  StoreConfig config_;
};

}  // namespace statclaim
