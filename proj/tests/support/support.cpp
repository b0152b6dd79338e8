#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "statclaim/corpus.hpp"
#include "statclaim/hashing.hpp"
#include "statclaim/perturb.hpp"
#include "statclaim/pipeline.hpp"
#include "statclaim/random.hpp"

namespace statclaim::testing {

TempDir::TempDir(const std::string& label) {
  static int counter = 0;
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    auto candidate = base / (label + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    if (std::filesystem::create_directories(candidate)) {
      path_ = candidate;
      break;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

MeasureSlice random_slice(std::uint64_t seed, int max_countries, int max_years) {
  Rng rng(seed);
  const int n_countries = rng.between(std::min(15, max_countries), max_countries);
  const int n_years = rng.between(std::min(5, max_years), max_years);
  const int start = 1990 + rng.between(0, 10);
  // Integer-valued series give frequent ties across countries and years.
  const bool coarse = rng.coin();
  MeasureSlice s;
  s.table_id = "R" + std::to_string(seed);
  s.combination.assignments = {{"MEASURE", "Units"}};
  s.window.start_year = start;
  s.window.end_year = start + n_years - 1;
  for (int c = 0; c < n_countries; ++c) {
    char name[16];
    std::snprintf(name, sizeof name, "C%02d", c);
    double level = coarse ? rng.between(0, 60) : 100.0 * rng.unit();
    const int late = rng.unit() < 0.15 ? rng.between(1, 4) : 0;
    for (int y = 0; y < n_years; ++y) {
      const double u = rng.unit();
      if (u < 0.25) {
        level += coarse ? rng.between(1, 3) : 5.0 * rng.unit();
      } else if (u < 0.45) {
        level -= coarse ? rng.between(1, 3) : 5.0 * rng.unit();
      } else if (u < 0.55) {
        // flat step
      } else {
        level += coarse ? rng.between(-6, 6) : 20.0 * (rng.unit() - 0.5);
      }
      if (y < late || rng.unit() < 0.08) continue;
      ObservationRow r;
      r.reference_area = name;
      r.year = start + y;
      r.measure_values = {{"MEASURE", "Units"}};
      r.obs_value = coarse ? std::round(level) : std::round(level * 100.0) / 100.0;
      r.status = "normal";
      s.rows.push_back(std::move(r));
    }
  }
  return s;
}

MeasureSlice slice_of(const std::vector<EvidenceRow>& rows, const std::string& table_id) {
  MeasureSlice s;
  s.table_id = table_id;
  s.combination.assignments = {{"MEASURE", "Units"}};
  int lo = 9999, hi = 0;
  for (const auto& e : rows) {
    ObservationRow r;
    r.reference_area = e.country;
    r.year = e.year;
    r.measure_values = {{"MEASURE", "Units"}};
    r.obs_value = e.value;
    r.status = "normal";
    s.rows.push_back(std::move(r));
    lo = std::min(lo, e.year);
    hi = std::max(hi, e.year);
  }
  std::sort(s.rows.begin(), s.rows.end(), [](const ObservationRow& a, const ObservationRow& b) {
    return std::tie(a.reference_area, a.year) < std::tie(b.reference_area, b.year);
  });
  s.window.start_year = lo;
  s.window.end_year = hi;
  return s;
}

PreparedFixture prepare_fixture(const FixtureConfig& config, const std::filesystem::path& dir,
                                const WindowConfig& window, const ExtractConfig& extract) {
  PreparedFixture fx;
  fx.fixture = generate_fixture(config, dir);
  ingest_corpus(fx.store, load_corpus_manifest(fx.fixture.corpus_manifest));
  fx.prepared = preprocess_corpus(fx.store, window);
  fx.samples = extract_corpus(fx.prepared, extract, 4).samples;
  for (const auto& s : fx.samples) fx.by_id[s.sample_id] = &s;
  return fx;
}

std::vector<ClaimRecord> fixture_claims(const PreparedFixture& fx, std::uint64_t seed, int cap) {
  ClaimGenConfig cfg;
  cfg.caps.english = cap;
  cfg.threads = 4;
  RuleJudge rule;
  const auto truth = generate_true_claims(fx.samples, table_contexts(fx.store), nullptr, {&rule}, cfg,
                                          derive_seed(seed, "generate"));
  const auto rows = measure_rows(fx.prepared);
  return add_false_claims(truth, fx.by_id, derive_seed(seed, "perturb"), {}, nullptr, &rows);
}

}  // namespace statclaim::testing
