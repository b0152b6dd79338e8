#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "statclaim/table_store.hpp"

namespace statclaim {

struct CorpusEntry {
  TableMeta meta;
  std::filesystem::path path;
};

/// JSON manifest:
///   {"tables": [{"table_id": "...", "path": "x.csv", "name": "...",
///                "description": "...", "hints": {"COL": "Measure"}}]}
/// Relative paths resolve against the manifest's directory.
std::vector<CorpusEntry> load_corpus_manifest(const std::filesystem::path& manifest);

void write_corpus_manifest(const std::filesystem::path& manifest,
                           const std::vector<CorpusEntry>& entries);

/// Ingests every entry; returns the ingested tables in manifest order.
std::vector<SourceTable> ingest_corpus(TableStore& store, const std::vector<CorpusEntry>& entries,
                                       bool replace = false);

}  // namespace statclaim
