#include "statclaim/table_store.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "statclaim/csv.hpp"
#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"

namespace statclaim {

using nlohmann::json;

std::string_view to_string(ColumnRole role) noexcept {
  switch (role) {
    case ColumnRole::Metadata: return "Metadata";
    case ColumnRole::Measure: return "Measure";
    case ColumnRole::MeasureIdentifier: return "MeasureIdentifier";
    case ColumnRole::ObservationValue: return "ObservationValue";
    case ColumnRole::ObservationStatus: return "ObservationStatus";
    case ColumnRole::TimePeriod: return "TimePeriod";
    case ColumnRole::ReferenceArea: return "ReferenceArea";
  }
  return "Measure";
}

std::optional<ColumnRole> parse_column_role(std::string_view text) noexcept {
  for (auto role : {ColumnRole::Metadata, ColumnRole::Measure, ColumnRole::MeasureIdentifier,
                    ColumnRole::ObservationValue, ColumnRole::ObservationStatus,
                    ColumnRole::TimePeriod, ColumnRole::ReferenceArea}) {
    if (to_string(role) == text) return role;
  }
  return std::nullopt;
}

std::string_view to_string(ValueKind kind) noexcept {
  switch (kind) {
    case ValueKind::Categorical: return "categorical";
    case ValueKind::Numeric: return "numeric";
    case ValueKind::Temporal: return "temporal";
  }
  return "categorical";
}

const ColumnSpec* SourceTable::find(std::string_view column_name) const {
  for (const auto& c : columns) {
    if (c.name == column_name) return &c;
  }
  return nullptr;
}

const ColumnSpec* SourceTable::first_with_role(ColumnRole role) const {
  for (const auto& c : columns) {
    if (c.role == role) return &c;
  }
  return nullptr;
}

std::vector<std::string> SourceTable::measure_columns() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.role == ColumnRole::Measure) out.push_back(c.name);
  }
  return out;
}

std::string TimePeriod::to_string() const {
  std::string out = std::to_string(year);
  if (!tag.empty()) out += "-" + tag;
  return out;
}

TimePeriod parse_time_period(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.size() < 4) throw Error(ErrorCode::Parse, "bad time period '" + std::string(text) + "'");
  int year = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + 4, year);
  if (ec != std::errc{} || ptr != text.data() + 4) {
    throw Error(ErrorCode::Parse, "bad time period '" + std::string(text) + "'");
  }
  if (year < 1900 || year > 2100) {
    throw Error(ErrorCode::Parse, "year out of range in '" + std::string(text) + "'");
  }
  TimePeriod out{year, {}};
  if (text.size() > 4) {
    if (text[4] != '-' || text.size() == 5) {
      throw Error(ErrorCode::Parse, "bad time period '" + std::string(text) + "'");
    }
    out.tag = std::string(text.substr(5));
  }
  return out;
}

std::string cell_to_string(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      return ec == std::errc{} ? std::string(buf, ptr) : std::string{};
    }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

// ---------------------------------------------------------------------------
// Column classification

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool in_list(std::string_view name, const std::vector<std::string>& list) {
  return std::any_of(list.begin(), list.end(), [&](const std::string& s) { return iequals(s, name); });
}

ValueKind kind_for(ColumnRole role) {
  switch (role) {
    case ColumnRole::ObservationValue: return ValueKind::Numeric;
    case ColumnRole::TimePeriod: return ValueKind::Temporal;
    default: return ValueKind::Categorical;
  }
}

/// Base column an identifier column would describe, if the suffix rule applies.
std::optional<std::string> identifier_base(const std::string& header,
                                           const std::vector<std::string>& headers,
                                           const std::string& suffix) {
  if (suffix.empty() || header.size() <= suffix.size()) return std::nullopt;
  if (!iequals(std::string_view(header).substr(header.size() - suffix.size()), suffix)) {
    return std::nullopt;
  }
  const std::string base = header.substr(0, header.size() - suffix.size());
  for (const auto& h : headers) {
    if (h == base) return base;
  }
  return std::nullopt;
}

}  // namespace

std::vector<ColumnSpec> classify_columns(const std::vector<std::string>& headers,
                                         const RoleHints& hints, const StoreConfig& config) {
  if (headers.empty()) throw Error(ErrorCode::InvalidArgument, "no headers");
  std::set<std::string> seen;
  for (const auto& h : headers) {
    if (h.empty()) throw Error(ErrorCode::InvalidArgument, "empty header");
    if (!seen.insert(h).second) throw Error(ErrorCode::InvalidArgument, "duplicate header " + h);
  }
  for (const auto& [name, role] : hints) {
    if (!seen.count(name)) throw Error(ErrorCode::UnknownColumn, "hint for unknown column " + name);
  }

  std::vector<ColumnSpec> specs;
  specs.reserve(headers.size());
  for (const auto& h : headers) {
    ColumnSpec spec{h, ColumnRole::Measure, ValueKind::Categorical, {}};
    if (in_list(h, config.obs_value_names)) {
      spec.role = ColumnRole::ObservationValue;
    } else if (in_list(h, config.status_names)) {
      spec.role = ColumnRole::ObservationStatus;
    } else if (in_list(h, config.time_names)) {
      spec.role = ColumnRole::TimePeriod;
    } else if (in_list(h, config.area_names)) {
      spec.role = ColumnRole::ReferenceArea;
    } else if (in_list(h, config.metadata_names)) {
      spec.role = ColumnRole::Metadata;
    } else if (auto base = identifier_base(h, headers, config.id_suffix)) {
      spec.role = ColumnRole::MeasureIdentifier;
      spec.identifies = *base;
    }
    specs.push_back(std::move(spec));
  }

  // The sole name-matched value column cannot be hinted away unless another
  // column is hinted to take its place.
  const bool hinted_value = std::any_of(hints.begin(), hints.end(), [](const auto& kv) {
    return kv.second == ColumnRole::ObservationValue;
  });
  std::size_t name_candidates = 0;
  for (const auto& s : specs) name_candidates += s.role == ColumnRole::ObservationValue;

  for (auto& spec : specs) {
    auto it = hints.find(spec.name);
    if (it == hints.end()) continue;
    const ColumnRole hinted = it->second;
    if (spec.role == ColumnRole::ObservationValue && hinted != ColumnRole::ObservationValue &&
        name_candidates == 1 && !hinted_value) {
      throw Error(ErrorCode::AmbiguousRole,
                  spec.name + " is the only observation value column but is hinted " +
                      std::string(to_string(hinted)));
    }
    if (hinted == ColumnRole::MeasureIdentifier) {
      auto base = identifier_base(spec.name, headers, config.id_suffix);
      if (!base) {
        throw Error(ErrorCode::AmbiguousRole,
                    spec.name + " hinted MeasureIdentifier but no column it identifies");
      }
      spec.identifies = *base;
    } else {
      spec.identifies.clear();
    }
    spec.role = hinted;
  }
  // A name-matched value column displaced by a hinted one becomes a measure.
  if (hinted_value) {
    for (auto& spec : specs) {
      if (spec.role == ColumnRole::ObservationValue && !hints.count(spec.name)) {
        spec.role = ColumnRole::Measure;
      }
    }
  }

  auto count_role = [&](ColumnRole r) {
    return std::count_if(specs.begin(), specs.end(), [r](const ColumnSpec& s) { return s.role == r; });
  };
  for (auto role : {ColumnRole::ObservationValue, ColumnRole::ObservationStatus,
                    ColumnRole::TimePeriod, ColumnRole::ReferenceArea}) {
    if (count_role(role) > 1) {
      throw Error(ErrorCode::AmbiguousRole,
                  "more than one column with role " + std::string(to_string(role)));
    }
  }
  for (auto& spec : specs) spec.kind = kind_for(spec.role);
  return specs;
}

// ---------------------------------------------------------------------------
// SQLite plumbing

namespace {

thread_local bool tl_query_mode = false;
thread_local bool tl_write_attempt = false;

int authorizer(void*, int action, const char*, const char*, const char*, const char*) {
  if (!tl_query_mode) return SQLITE_OK;
  switch (action) {
    case SQLITE_SELECT:
    case SQLITE_READ:
    case SQLITE_FUNCTION:
    case SQLITE_RECURSIVE:
      return SQLITE_OK;
    default:
      tl_write_attempt = true;
      return SQLITE_DENY;
  }
}

// Holds the connection mutex so errmsg reads the error of this thread's call.
class DbLock {
 public:
  explicit DbLock(sqlite3* db) : mutex_(sqlite3_db_mutex(db)) { sqlite3_mutex_enter(mutex_); }
  ~DbLock() { sqlite3_mutex_leave(mutex_); }
  DbLock(const DbLock&) = delete;
  DbLock& operator=(const DbLock&) = delete;

 private:
  sqlite3_mutex* mutex_;
};

class Statement {
 public:
  Statement(sqlite3* db, std::string_view sql) : db_(db) {
    DbLock lock(db);
    if (sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &stmt_, nullptr) !=
        SQLITE_OK) {
      throw Error(ErrorCode::Io, std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  sqlite3_stmt* get() const { return stmt_; }

  void bind_text(int i, std::string_view v) {
    sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
  }
  void bind_null(int i) { sqlite3_bind_null(stmt_, i); }
  void bind_double(int i, double v) { sqlite3_bind_double(stmt_, i, v); }
  void bind_int(int i, std::int64_t v) { sqlite3_bind_int64(stmt_, i, v); }

  bool step() {
    DbLock lock(db_);
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(ErrorCode::Io, std::string("sqlite step: ") + sqlite3_errmsg(db_));
  }
  void reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }

  bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
  std::string text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? std::string(reinterpret_cast<const char*>(p),
                           static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
             : std::string{};
  }
  double real(int col) const { return sqlite3_column_double(stmt_, col); }
  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error(ErrorCode::Io, "sqlite: " + msg + " [" + sql + "]");
  }
}

std::string quote_ident(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool valid_table_id(std::string_view id) {
  if (id.empty() || id.front() == '_' || std::isdigit(static_cast<unsigned char>(id.front()))) {
    return false;
  }
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::optional<double> parse_obs_value(const std::string& raw, long line) {
  const std::string text = trim(raw);
  if (text.empty() || iequals(text, "nan") || iequals(text, "null") || iequals(text, "NA")) {
    return std::nullopt;
  }
  double value = 0.0;
  const char* begin = text.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::MalformedRow, "obs_value '" + text + "' is not a finite number", line);
  }
  return value;
}

json columns_to_json(const std::vector<ColumnSpec>& cols) {
  json arr = json::array();
  for (const auto& c : cols) {
    json o{{"name", c.name}, {"role", to_string(c.role)}, {"kind", to_string(c.kind)}};
    if (!c.identifies.empty()) o["identifies"] = c.identifies;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<ColumnSpec> columns_from_json(const json& arr) {
  std::vector<ColumnSpec> out;
  for (const auto& o : arr) {
    ColumnSpec c;
    c.name = o.at("name").get<std::string>();
    c.role = parse_column_role(o.at("role").get<std::string>()).value_or(ColumnRole::Measure);
    c.kind = kind_for(c.role);
    c.identifies = o.value("identifies", "");
    out.push_back(std::move(c));
  }
  return out;
}

constexpr std::string_view kTagColumn = "_period_tag";
constexpr std::string_view kOrderColumn = "_row";

}  // namespace

struct TableStore::Impl {
  sqlite3* db = nullptr;

  ~Impl() {
    if (db) sqlite3_close(db);
  }
};

TableStore::TableStore(const std::string& path, StoreConfig config)
    : impl_(std::make_unique<Impl>()), config_(std::move(config)) {
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &impl_->db, flags, nullptr) != SQLITE_OK) {
    std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "out of memory";
    throw Error(ErrorCode::Io, "cannot open store " + path + ": " + msg);
  }
  sqlite3_set_authorizer(impl_->db, authorizer, nullptr);
  exec(impl_->db,
       "CREATE TABLE IF NOT EXISTS _catalog (table_id TEXT PRIMARY KEY, name TEXT, "
       "description TEXT, columns TEXT, row_count INTEGER)");
}

TableStore::~TableStore() = default;
TableStore::TableStore(TableStore&&) noexcept = default;
TableStore& TableStore::operator=(TableStore&&) noexcept = default;

SourceTable TableStore::ingest_table(const std::filesystem::path& path, const TableMeta& meta,
                                     bool replace) {
  if (!valid_table_id(meta.table_id)) {
    throw Error(ErrorCode::InvalidArgument, "table_id '" + meta.table_id +
                                                "' must be an identifier not starting with '_'");
  }
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::Io, "no such file " + path.string());

  const auto records = csv::read_file(path);
  if (records.empty()) throw Error(ErrorCode::Parse, "missing header row in " + path.string());
  std::vector<std::string> headers;
  for (const auto& f : records.front().fields) headers.push_back(trim(f));

  SourceTable table;
  table.table_id = meta.table_id;
  table.name = meta.name.empty() ? meta.table_id : meta.name;
  table.description = meta.description;
  table.columns = classify_columns(headers, meta.hints, config_);

  if (!table.first_with_role(ColumnRole::ObservationValue)) {
    throw Error(ErrorCode::MissingObsValueColumn, path.string());
  }
  if (!table.first_with_role(ColumnRole::TimePeriod)) {
    throw Error(ErrorCode::Parse, "no time period column in " + path.string());
  }
  if (has_table(meta.table_id) && !replace) {
    throw Error(ErrorCode::DuplicateTableId, meta.table_id);
  }

  sqlite3* db = impl_->db;
  exec(db, "BEGIN");
  try {
    exec(db, "DELETE FROM _catalog WHERE table_id = '" + meta.table_id + "'");
    exec(db, "DROP TABLE IF EXISTS " + quote_ident(meta.table_id));

    std::string create = "CREATE TABLE " + quote_ident(meta.table_id) + " (";
    std::string insert = "INSERT INTO " + quote_ident(meta.table_id) + " VALUES (";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      const auto& c = table.columns[i];
      const char* type = c.role == ColumnRole::ObservationValue ? "REAL"
                         : c.role == ColumnRole::TimePeriod     ? "INTEGER"
                                                                : "TEXT";
      create += quote_ident(c.name) + " " + type + ", ";
      insert += "?, ";
    }
    create += quote_ident(kTagColumn) + " TEXT, " + quote_ident(kOrderColumn) + " INTEGER)";
    insert += "?, ?)";
    exec(db, create);

    Statement ins(db, insert);
    std::size_t row_count = 0;
    for (std::size_t r = 1; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.fields.size() != table.columns.size()) {
        throw Error(ErrorCode::MalformedRow,
                    "expected " + std::to_string(table.columns.size()) + " fields, got " +
                        std::to_string(rec.fields.size()),
                    rec.line);
      }
      std::string tag;
      for (std::size_t i = 0; i < table.columns.size(); ++i) {
        const auto& c = table.columns[i];
        const int idx = static_cast<int>(i) + 1;
        const std::string& raw = rec.fields[i];
        if (c.role == ColumnRole::ObservationValue) {
          if (auto v = parse_obs_value(raw, rec.line)) {
            ins.bind_double(idx, *v);
          } else {
            ins.bind_null(idx);
          }
        } else if (c.role == ColumnRole::TimePeriod) {
          try {
            const TimePeriod tp = parse_time_period(raw);
            ins.bind_int(idx, tp.year);
            tag = tp.tag;
          } catch (const Error& e) {
            throw Error(ErrorCode::MalformedRow, e.what(), rec.line);
          }
        } else if (raw.empty()) {
          ins.bind_null(idx);
        } else {
          ins.bind_text(idx, raw);
        }
      }
      const int base = static_cast<int>(table.columns.size());
      if (tag.empty()) {
        ins.bind_null(base + 1);
      } else {
        ins.bind_text(base + 1, tag);
      }
      ins.bind_int(base + 2, static_cast<std::int64_t>(row_count));
      ins.step();
      ins.reset();
      ++row_count;
    }
    table.row_count = row_count;

    Statement cat(db, "INSERT INTO _catalog VALUES (?, ?, ?, ?, ?)");
    cat.bind_text(1, table.table_id);
    cat.bind_text(2, table.name);
    cat.bind_text(3, table.description);
    cat.bind_text(4, columns_to_json(table.columns).dump());
    cat.bind_int(5, static_cast<std::int64_t>(row_count));
    cat.step();
    exec(db, "COMMIT");
  } catch (...) {
    exec(db, "ROLLBACK");
    throw;
  }
  return table;
}

std::vector<std::string> TableStore::table_ids() const {
  std::vector<std::string> out;
  Statement st(impl_->db, "SELECT table_id FROM _catalog ORDER BY table_id");
  while (st.step()) out.push_back(st.text(0));
  return out;
}

bool TableStore::has_table(std::string_view table_id) const {
  Statement st(impl_->db, "SELECT 1 FROM _catalog WHERE table_id = ?");
  st.bind_text(1, table_id);
  return st.step();
}

SourceTable TableStore::table(std::string_view table_id) const {
  Statement st(impl_->db,
               "SELECT table_id, name, description, columns, row_count FROM _catalog "
               "WHERE table_id = ?");
  st.bind_text(1, table_id);
  if (!st.step()) throw Error(ErrorCode::UnknownTable, std::string(table_id));
  SourceTable t;
  t.table_id = st.text(0);
  t.name = st.text(1);
  t.description = st.text(2);
  t.columns = columns_from_json(json::parse(st.text(3)));
  t.row_count = static_cast<std::size_t>(st.integer(4));
  return t;
}

std::vector<SourceTable> TableStore::tables() const {
  std::vector<SourceTable> out;
  for (const auto& id : table_ids()) out.push_back(table(id));
  return out;
}

std::vector<ObservationRow> TableStore::rows(std::string_view table_id) const {
  const SourceTable t = table(table_id);
  const ColumnSpec* area = t.first_with_role(ColumnRole::ReferenceArea);
  const ColumnSpec* time = t.first_with_role(ColumnRole::TimePeriod);
  const ColumnSpec* value = t.first_with_role(ColumnRole::ObservationValue);
  const ColumnSpec* status = t.first_with_role(ColumnRole::ObservationStatus);
  const auto measures = t.measure_columns();

  std::string sql = "SELECT ";
  sql += area ? quote_ident(area->name) : std::string("NULL");
  sql += ", " + quote_ident(time->name) + ", " + quote_ident(kTagColumn) + ", " +
         quote_ident(value->name) + ", ";
  sql += status ? quote_ident(status->name) : std::string("NULL");
  sql += ", " + quote_ident(kOrderColumn);
  for (const auto& m : measures) sql += ", " + quote_ident(m);
  sql += " FROM " + quote_ident(t.table_id) + " ORDER BY " + quote_ident(kOrderColumn);

  std::vector<ObservationRow> out;
  out.reserve(t.row_count);
  Statement st(impl_->db, sql);
  while (st.step()) {
    ObservationRow r;
    r.reference_area = st.text(0);
    r.year = static_cast<int>(st.integer(1));
    r.period_tag = st.text(2);
    if (!st.is_null(3)) r.obs_value = st.real(3);
    r.status = st.is_null(4) ? config_.normal_status : st.text(4);
    r.ingest_order = st.integer(5);
    for (std::size_t i = 0; i < measures.size(); ++i) {
      const int col = static_cast<int>(i) + 6;
      if (!st.is_null(col)) r.measure_values.emplace(measures[i], st.text(col));
    }
    out.push_back(std::move(r));
  }
  return out;
}

UniqueValues TableStore::unique_values(std::string_view table_id, std::string_view column,
                                       std::optional<std::size_t> limit) const {
  const SourceTable t = table(table_id);
  const ColumnSpec* spec = t.find(column);
  if (!spec) throw Error(ErrorCode::UnknownColumn, std::string(table_id) + "." + std::string(column));
  if (spec->kind != ValueKind::Categorical) {
    throw Error(ErrorCode::InvalidArgument, std::string(column) + " is not categorical");
  }
  if (limit && *limit == 0) throw Error(ErrorCode::InvalidArgument, "limit must be positive");
  const std::string q = quote_ident(column);
  Statement st(impl_->db, "SELECT DISTINCT " + q + " FROM " + quote_ident(t.table_id) +
                              " WHERE " + q + " IS NOT NULL ORDER BY " + q);
  UniqueValues out;
  while (st.step()) {
    ++out.total;
    if (!limit || out.values.size() < *limit) out.values.push_back(st.text(0));
  }
  return out;
}

ResultSet TableStore::run_query(std::string_view sql) const {
  sqlite3* db = impl_->db;
  DbLock lock(db);
  sqlite3_stmt* raw = nullptr;
  const char* tail = nullptr;

  tl_query_mode = true;
  tl_write_attempt = false;
  const int rc = sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &raw, &tail);
  tl_query_mode = false;
  std::unique_ptr<sqlite3_stmt, int (*)(sqlite3_stmt*)> stmt(raw, sqlite3_finalize);

  if (rc != SQLITE_OK) {
    if (tl_write_attempt) throw Error(ErrorCode::SqlRejectedWrite, std::string(sql));
    throw Error(ErrorCode::SqlSyntaxError, sqlite3_errmsg(db));
  }
  if (!stmt) throw Error(ErrorCode::SqlSyntaxError, "empty statement");
  if (tail) {
    std::string_view rest(tail);
    const bool only_space = std::all_of(rest.begin(), rest.end(), [](char c) {
      return std::isspace(static_cast<unsigned char>(c)) || c == ';';
    });
    if (!only_space) throw Error(ErrorCode::SqlSyntaxError, "only one statement is allowed");
  }
  if (!sqlite3_stmt_readonly(stmt.get())) {
    throw Error(ErrorCode::SqlRejectedWrite, std::string(sql));
  }

  ResultSet out;
  const int ncol = sqlite3_column_count(stmt.get());
  for (int i = 0; i < ncol; ++i) out.columns.emplace_back(sqlite3_column_name(stmt.get(), i));

  while (true) {
    const int step = sqlite3_step(stmt.get());
    if (step == SQLITE_DONE) break;
    if (step != SQLITE_ROW) throw Error(ErrorCode::SqlSyntaxError, sqlite3_errmsg(db));
    if (out.rows.size() == config_.max_result_rows) {
      out.truncated = true;
      break;
    }
    std::vector<Cell> row;
    row.reserve(static_cast<std::size_t>(ncol));
    for (int i = 0; i < ncol; ++i) {
      switch (sqlite3_column_type(stmt.get(), i)) {
        case SQLITE_INTEGER: row.emplace_back(std::int64_t{sqlite3_column_int64(stmt.get(), i)}); break;
        case SQLITE_FLOAT: row.emplace_back(sqlite3_column_double(stmt.get(), i)); break;
        case SQLITE_NULL: row.emplace_back(std::monostate{}); break;
        default: {
          const auto* p = sqlite3_column_text(stmt.get(), i);
          row.emplace_back(std::string(reinterpret_cast<const char*>(p),
                                       static_cast<std::size_t>(sqlite3_column_bytes(stmt.get(), i))));
        }
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

void TableStore::export_table(std::string_view table_id, const std::filesystem::path& path) const {
  const SourceTable t = table(table_id);
  std::vector<ColumnSpec> cols = t.columns;
  std::sort(cols.begin(), cols.end(),
            [](const ColumnSpec& a, const ColumnSpec& b) { return a.name < b.name; });
  const ColumnSpec* area = t.first_with_role(ColumnRole::ReferenceArea);
  const ColumnSpec* time = t.first_with_role(ColumnRole::TimePeriod);

  std::string sql = "SELECT ";
  for (const auto& c : cols) sql += quote_ident(c.name) + ", ";
  sql += quote_ident(kTagColumn) + " FROM " + quote_ident(t.table_id) + " ORDER BY ";
  if (area) sql += quote_ident(area->name) + ", ";
  sql += quote_ident(time->name) + ", " + quote_ident(kTagColumn) + ", " + quote_ident(kOrderColumn);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  std::vector<std::string> fields;
  for (const auto& c : cols) fields.push_back(c.name);
  csv::write_row(out, fields);

  Statement st(impl_->db, sql);
  const int tag_col = static_cast<int>(cols.size());
  while (st.step()) {
    fields.clear();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const int col = static_cast<int>(i);
      if (st.is_null(col)) {
        fields.emplace_back();
      } else if (cols[i].role == ColumnRole::TimePeriod) {
        fields.push_back(TimePeriod{static_cast<int>(st.integer(col)), st.text(tag_col)}.to_string());
      } else if (cols[i].role == ColumnRole::ObservationValue) {
        fields.push_back(cell_to_string(Cell{st.real(col)}));
      } else {
        fields.push_back(st.text(col));
      }
    }
    csv::write_row(out, fields);
  }
}

std::string TableStore::checksum() const {
  std::string material;
  Statement cat(impl_->db, "SELECT table_id, name, description, columns, row_count FROM _catalog "
                           "ORDER BY table_id");
  std::vector<std::string> ids;
  while (cat.step()) {
    ids.push_back(cat.text(0));
    for (int i = 0; i < 5; ++i) material += cat.text(i) + '\x1f';
    material += '\n';
  }
  for (const auto& id : ids) {
    Statement st(impl_->db, "SELECT * FROM " + quote_ident(id) + " ORDER BY " +
                                quote_ident(kOrderColumn));
    const int ncol = sqlite3_column_count(st.get());
    while (st.step()) {
      for (int i = 0; i < ncol; ++i) {
        material += st.is_null(i) ? std::string("\x01") : st.text(i);
        material += '\x1f';
      }
      material += '\n';
    }
  }
  return sha256_hex(material);
}

}  // namespace statclaim
