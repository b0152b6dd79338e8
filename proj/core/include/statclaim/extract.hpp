#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "statclaim/preprocess.hpp"

namespace statclaim {

enum class ClaimType { TopK, ConstantChange, HistoricalExtreme, ChangeInRank, ChangeOverTime, HaveTrait };

inline constexpr ClaimType kAllClaimTypes[] = {
    ClaimType::TopK,         ClaimType::ConstantChange, ClaimType::HistoricalExtreme,
    ClaimType::ChangeInRank, ClaimType::ChangeOverTime, ClaimType::HaveTrait};

std::string_view to_string(ClaimType type) noexcept;
std::optional<ClaimType> parse_claim_type(std::string_view text) noexcept;

/// Direction tokens shared by the claim payloads and binary perturbation.
enum class Direction { Top, Bottom, Increase, Decrease, Highest, Lowest };

std::string_view to_string(Direction d) noexcept;
std::optional<Direction> parse_direction(std::string_view text) noexcept;

struct SeriesPoint {
  int year = 0;
  double value = 0.0;
  auto operator<=>(const SeriesPoint&) const = default;
};

/// One country's observations within a slice; years strictly increasing.
struct CountrySeries {
  std::string reference_area;
  std::vector<SeriesPoint> points;
};

struct EvidenceRow {
  std::string country;
  int year = 0;
  double value = 0.0;
  auto operator<=>(const EvidenceRow&) const = default;
};

struct TopKPayload {
  std::string country;
  int year = 0;
  int k = 0;
  Direction direction = Direction::Top;
  int rank = 0;
  double value = 0.0;
  int n_countries = 0;
  auto operator<=>(const TopKPayload&) const = default;
};

struct ConstantChangePayload {
  std::string country;
  Direction direction = Direction::Increase;
  int n_years = 0;
  SeriesPoint start;
  SeriesPoint end;
  auto operator<=>(const ConstantChangePayload&) const = default;
};

struct HistoricalExtremePayload {
  std::string country;
  int year = 0;
  double value = 0.0;
  Direction direction = Direction::Highest;
  int n_years = 0;
  auto operator<=>(const HistoricalExtremePayload&) const = default;
};

struct ChangeInRankPayload {
  std::string country;
  int year_a = 0;
  int year_b = 0;
  int rank_a = 0;
  int rank_b = 0;
  int n_countries_a = 0;
  int n_countries_b = 0;
  double value_a = 0.0;
  double value_b = 0.0;
  auto operator<=>(const ChangeInRankPayload&) const = default;
};

struct ChangeOverTimePayload {
  std::string country;
  int year_a = 0;
  int year_b = 0;
  double value_a = 0.0;
  double value_b = 0.0;
  auto operator<=>(const ChangeOverTimePayload&) const = default;
};

struct HaveTraitPayload {
  std::string country;
  int year = 0;
  double value = 0.0;
  auto operator<=>(const HaveTraitPayload&) const = default;
};

/// Alternative order matches ClaimType.
using Payload = std::variant<TopKPayload, ConstantChangePayload, HistoricalExtremePayload,
                             ChangeInRankPayload, ChangeOverTimePayload, HaveTraitPayload>;

ClaimType claim_type_of(const Payload& payload) noexcept;
const std::string& payload_country(const Payload& payload) noexcept;

/// The gold evidence behind one claim.
struct DataSample {
  std::string sample_id;
  ClaimType claim_type = ClaimType::HaveTrait;
  std::string table_id;
  MeasureCombination combination;
  Payload payload;
  std::vector<EvidenceRow> evidence_rows;

  bool operator==(const DataSample&) const = default;
};

/// Builds a sample and assigns its content hash.
DataSample make_sample(std::string table_id, MeasureCombination combination, Payload payload,
                       std::vector<EvidenceRow> evidence);

/// Thresholds for the six extractors.
struct ExtractConfig {
  int top_k_min_countries = 20;
  int top_k_large_above = 50;  // k_large applies when n > this
  int k_large = 5;
  int k_small = 3;
  int min_run_years = 8;
  int min_extreme_years = 10;
  int rank_shift_min_positions = 10;
  double rank_shift_fraction = 0.2;
  double rank_ratio = 2.0;
};

/// Identifies the slice a per-series extractor works on.
struct SliceContext {
  std::string table_id;
  MeasureCombination combination;
};

std::vector<CountrySeries> build_series(const MeasureSlice& slice);

/// Rank within a year: value descending, ties by area name; rank 1 = largest.
struct RankedEntry {
  std::string country;
  double value = 0.0;
  int rank = 0;
};
std::vector<RankedEntry> rank_year(const MeasureSlice& slice, int year);

std::vector<DataSample> extract_top_k(const MeasureSlice& slice, const ExtractConfig& config = {});
std::vector<DataSample> extract_constant_change(const CountrySeries& series, const SliceContext& ctx,
                                                const ExtractConfig& config = {});
std::vector<DataSample> extract_historical_extreme(const CountrySeries& series,
                                                   const SliceContext& ctx,
                                                   const ExtractConfig& config = {});
std::vector<DataSample> extract_rank_shifts(const MeasureSlice& slice,
                                            const ExtractConfig& config = {});
std::vector<DataSample> derive_change_over_time(const std::vector<DataSample>& rank_samples);
std::vector<DataSample> derive_have_trait(const std::vector<DataSample>& rank_samples,
                                          const std::vector<DataSample>& cot_samples);

/// True when a rank pair counts as a substantial shift.
bool is_substantial_rank_shift(int rank_a, int rank_b, int n_countries_a,
                               const ExtractConfig& config = {});

struct ExtractionBatch {
  /// Sorted by sample_id, no duplicates.
  std::vector<DataSample> samples;
};

ExtractionBatch extract_all(const MeasureSlice& slice, const ExtractConfig& config = {});

/// Merges batches, keeping sample_id order and dropping duplicate ids.
ExtractionBatch merge_batches(std::vector<ExtractionBatch> batches);

/// Type-invariant violations for one sample (empty when conforming).
std::vector<std::string> check_sample_invariants(const DataSample& sample,
                                                 const ExtractConfig& config = {},
                                                 const TimeWindow* window = nullptr);

}  // namespace statclaim
