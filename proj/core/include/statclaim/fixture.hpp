#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace statclaim {

struct FixtureConfig {
  int n_tables = 6;
  int n_countries = 30;
  int n_years = 20;
  std::uint64_t seed = 7;
  int start_year = 2000;
};

struct FixtureResult {
  std::filesystem::path corpus_manifest;
  std::filesystem::path expected_manifest;
  /// Oracle counts: table_id -> claim type -> samples.
  std::map<std::string, std::map<std::string, std::size_t>> expected;
  std::map<std::string, std::size_t> totals;
  bool sub_threshold = false;
};

/// Writes a synthetic long-format corpus under `out_dir`: tables/<id>.csv,
/// corpus.json and expected.json. Series are noisy random walks with planted
/// monotone runs, level jumps that move ranks, late reporters, estimated
/// (non-normal) observations and blanks. Tables come in pairs that share
/// their measure values. Expected counts come from the brute-force oracle.
/// Same config, same bytes.
FixtureResult generate_fixture(const FixtureConfig& config, const std::filesystem::path& out_dir);

}  // namespace statclaim
