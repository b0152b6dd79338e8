#include "statclaim/fixture.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "statclaim/corpus.hpp"
#include "statclaim/csv.hpp"
#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"
#include "statclaim/oracle.hpp"
#include "statclaim/preprocess.hpp"
#include "statclaim/random.hpp"
#include "statclaim/serialize.hpp"

namespace statclaim {

namespace {

const char* const kCountries[] = {
    "Australia", "Austria",     "Belgium",   "Canada",      "Chile",          "Colombia",    "Costa Rica",
    "Czechia",   "Denmark",     "Estonia",   "Finland",     "France",         "Germany",     "Greece",
    "Hungary",   "Iceland",     "Ireland",   "Israel",      "Italy",          "Japan",       "Korea",
    "Latvia",    "Lithuania",   "Luxembourg", "Mexico",     "Netherlands",    "New Zealand", "Norway",
    "Poland",    "Portugal",    "Slovakia",  "Slovenia",    "Spain",          "Sweden",      "Switzerland",
    "Turkey",    "United Kingdom", "United States", "Argentina", "Brazil",   "Bulgaria",    "China",
    "Croatia",   "Cyprus",      "India",     "Indonesia",   "Malta",          "Peru",        "Romania",
    "Russia",    "Saudi Arabia", "Singapore", "South Africa", "Thailand",    "Egypt",       "Morocco",
    "Kenya",     "Nigeria",     "Vietnam",   "Philippines"};

struct Family {
  const char* measures[2];
  const char* names[2];
  const char* descriptions[2];
};

const Family kFamilies[] = {
    {{"Per million inhabitants", "Per billion vehicle-kilometres"},
     {"Road fatalities", "Road injuries"},
     {"Persons killed in road traffic accidents.", "Persons injured in road traffic accidents."}},
    {{"Percentage of GDP", "US dollars per capita"},
     {"Health expenditure", "Education expenditure"},
     {"Public and private spending on health care.", "Public and private spending on education."}},
    {{"Percentage of labour force", "Thousands of persons"},
     {"Unemployment", "Youth unemployment"},
     {"Unemployed persons aged 15 to 64.", "Unemployed persons aged 15 to 24."}},
    {{"Tonnes per capita", "Index 2015=100"},
     {"Greenhouse gas emissions", "Energy consumption"},
     {"Emissions of all greenhouse gases.", "Total final energy consumption."}},
};

std::string country_name(int i) {
  constexpr int n = static_cast<int>(std::size(kCountries));
  return i < n ? kCountries[i] : "Region " + std::to_string(i + 1);
}

double gaussian(Rng& rng) {
  const double u1 = 1.0 - rng.unit();
  const double u2 = rng.unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// One country's series for one measure.
std::vector<double> make_series(Rng& rng, int n_years) {
  std::vector<double> v(static_cast<std::size_t>(n_years));
  double level = 10.0 + 990.0 * rng.unit();
  for (auto& x : v) {
    level *= 1.0 + 0.06 * gaussian(rng);
    x = std::max(level, 0.5);
  }
  // Planted strictly monotone run of 8..12 years.
  if (rng.unit() < 0.35 && n_years >= 8) {
    const int len = rng.between(8, std::min(12, n_years));
    const int start = rng.between(0, n_years - len);
    const bool up = rng.coin();
    double x = v[static_cast<std::size_t>(start)];
    for (int i = start; i < start + len; ++i) {
      v[static_cast<std::size_t>(i)] = x;
      x *= up ? 1.02 + 0.05 * rng.unit() : 0.98 - 0.05 * rng.unit();
    }
  }
  // Level jump that moves the country through the ranking.
  if (rng.unit() < 0.25 && n_years >= 4) {
    const int at = rng.between(2, n_years - 2);
    const double factor = rng.coin() ? 3.0 + rng.unit() : 1.0 / (3.0 + rng.unit());
    for (int i = at; i < n_years; ++i) v[static_cast<std::size_t>(i)] *= factor;
  }
  // Spike that sets a record.
  if (rng.unit() < 0.3 && n_years >= 12) {
    const int at = rng.between(10, n_years - 1);
    v[static_cast<std::size_t>(at)] *= rng.coin() ? 1.8 : 0.4;
  }
  return v;
}

}  // namespace

FixtureResult generate_fixture(const FixtureConfig& config, const std::filesystem::path& out_dir) {
  if (config.n_tables <= 0 || config.n_countries <= 0 || config.n_years <= 0) {
    throw Error(ErrorCode::InvalidArgument, "fixture sizes must be positive");
  }
  std::filesystem::create_directories(out_dir / "tables");
  std::vector<CorpusEntry> entries;

  for (int t = 0; t < config.n_tables; ++t) {
    const auto& family = kFamilies[static_cast<std::size_t>(t / 2) % std::size(kFamilies)];
    const int variant = t % 2;
    const int round = t / static_cast<int>(2 * std::size(kFamilies));
    char id[32];
    std::snprintf(id, sizeof id, "T%02d", t + 1);
    CorpusEntry entry;
    entry.meta.table_id = id;
    entry.meta.name = family.names[variant];
    if (round > 0) entry.meta.name += " series " + std::to_string(round + 1);
    entry.meta.description = family.descriptions[variant];
    entry.path = out_dir / "tables" / (std::string(id) + ".csv");

    Rng rng(derive_seed(config.seed, std::string("fixture|") + id));
    std::ofstream out(entry.path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + entry.path.string());
    csv::write_row(out, {"DATAFLOW", "REF_AREA", "MEASURE", "UNIT_MULT", "TIME_PERIOD", "OBS_VALUE", "OBS_STATUS"});
    for (int c = 0; c < config.n_countries; ++c) {
      const std::string country = country_name(c);
      // A few late reporters shape the coverage window.
      const int first = rng.unit() < 0.1 ? rng.between(1, 3) : 0;
      for (const char* measure : family.measures) {
        const auto series = make_series(rng, config.n_years);
        for (int y = first; y < config.n_years; ++y) {
          const double draw = rng.unit();
          std::string value = fmt2(series[static_cast<std::size_t>(y)]);
          std::string status;
          if (draw < 0.01) {
            value.clear();
          } else if (draw < 0.02) {
            status = "E";
          }
          csv::write_row(out, {"OECD.FIX", country, measure, "0", std::to_string(config.start_year + y), value,
                               status});
        }
      }
    }
    entries.push_back(std::move(entry));
  }

  FixtureResult result;
  result.corpus_manifest = out_dir / "corpus.json";
  result.expected_manifest = out_dir / "expected.json";
  write_corpus_manifest(result.corpus_manifest, entries);

  TableStore store;
  ingest_corpus(store, entries);
  const auto prepared = preprocess_corpus(store);
  for (const auto& e : entries) {
    auto& counts = result.expected[e.meta.table_id];
    for (auto type : kAllClaimTypes) counts[std::string(to_string(type))] = 0;
  }
  for (const auto& p : prepared.tables) {
    for (const auto& [combination, rows] : p.combinations) {
      const auto s = slice(p.view, combination, p.window);
      for (const auto& sample : oracle::extract_all(s)) {
        ++result.expected[p.view.table.table_id][std::string(to_string(sample.claim_type))];
      }
    }
  }
  for (const auto& [table, counts] : result.expected) {
    for (const auto& [type, n] : counts) result.totals[type] += n;
  }
  result.sub_threshold = config.n_countries < 20;

  nlohmann::json manifest{{"seed", config.seed},
                          {"n_tables", config.n_tables},
                          {"n_countries", config.n_countries},
                          {"n_years", config.n_years},
                          {"start_year", config.start_year},
                          {"sub_threshold", result.sub_threshold},
                          {"tables", result.expected},
                          {"totals", result.totals}};
  write_json(result.expected_manifest, manifest);
  return result;
}

}  // namespace statclaim
