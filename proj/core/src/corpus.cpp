#include "statclaim/corpus.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "statclaim/error.hpp"

namespace statclaim {

using nlohmann::json;

std::vector<CorpusEntry> load_corpus_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::Io, "cannot open corpus manifest " + manifest.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, manifest.string() + ": " + e.what());
  }
  const auto base = manifest.parent_path();
  std::vector<CorpusEntry> out;
  for (const auto& t : doc.at("tables")) {
    CorpusEntry e;
    e.meta.table_id = t.at("table_id").get<std::string>();
    e.meta.name = t.value("name", e.meta.table_id);
    e.meta.description = t.value("description", "");
    if (t.contains("hints")) {
      for (const auto& [col, role_text] : t.at("hints").items()) {
        auto role = parse_column_role(role_text.get<std::string>());
        if (!role) {
          throw Error(ErrorCode::Parse, "unknown role '" + role_text.get<std::string>() +
                                            "' for " + e.meta.table_id + "." + col);
        }
        e.meta.hints.emplace(col, *role);
      }
    }
    std::filesystem::path p = t.at("path").get<std::string>();
    e.path = p.is_absolute() ? p : base / p;
    out.push_back(std::move(e));
  }
  return out;
}

void write_corpus_manifest(const std::filesystem::path& manifest,
                           const std::vector<CorpusEntry>& entries) {
  json tables = json::array();
  const auto base = manifest.parent_path().empty() ? std::filesystem::path(".") : manifest.parent_path();
  for (const auto& e : entries) {
    // Paths under the manifest's directory are stored relative to it.
    std::filesystem::path stored = e.path;
    std::error_code ec;
    auto rel = std::filesystem::relative(e.path, base, ec);
    if (!ec && !rel.empty() && rel.native().rfind("..", 0) != 0) stored = rel;
    json t{{"table_id", e.meta.table_id},
           {"path", stored.generic_string()},
           {"name", e.meta.name},
           {"description", e.meta.description}};
    if (!e.meta.hints.empty()) {
      json hints = json::object();
      for (const auto& [col, role] : e.meta.hints) hints[col] = to_string(role);
      t["hints"] = std::move(hints);
    }
    tables.push_back(std::move(t));
  }
  std::ofstream out(manifest);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + manifest.string());
  out << json{{"tables", tables}}.dump(2) << '\n';
}

std::vector<SourceTable> ingest_corpus(TableStore& store, const std::vector<CorpusEntry>& entries,
                                       bool replace) {
  std::vector<SourceTable> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(store.ingest_table(e.path, e.meta, replace));
  return out;
}

}  // namespace statclaim
