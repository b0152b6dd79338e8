#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "statclaim/claimgen.hpp"
#include "statclaim/extract.hpp"
#include "statclaim/fixture.hpp"
#include "statclaim/preprocess.hpp"
#include "statclaim/table_store.hpp"

namespace statclaim::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label = "statclaim");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Seeded slice of up to `max_countries` x `max_years` with gaps, ties,
/// monotone stretches and flat runs.
MeasureSlice random_slice(std::uint64_t seed, int max_countries = 40, int max_years = 30);

/// A slice built from (country, year, value) triples.
MeasureSlice slice_of(const std::vector<EvidenceRow>& rows, const std::string& table_id = "T");

/// A generated fixture, ingested, preprocessed and extracted.
struct PreparedFixture {
  FixtureResult fixture;
  TableStore store;
  PreprocessResult prepared;
  std::vector<DataSample> samples;
  std::map<std::string, const DataSample*> by_id;
};

PreparedFixture prepare_fixture(const FixtureConfig& config, const std::filesystem::path& dir,
                                const WindowConfig& window = {}, const ExtractConfig& extract = {});

/// Template true claims for every sample (no caps), then one false claim each.
std::vector<ClaimRecord> fixture_claims(const PreparedFixture& fx, std::uint64_t seed, int cap = 100000);

}  // namespace statclaim::testing
