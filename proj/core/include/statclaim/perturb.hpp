#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "statclaim/claims.hpp"
#include "statclaim/extract.hpp"
#include "statclaim/random.hpp"

namespace statclaim {

struct PerturbConfig {
  std::vector<double> scaling_factors{0.5, 1.5, 2.0};
  int rank_shift_floor = 5;
  double rank_shift_fraction = 0.15;
  int shift_min = 2;
  int shift_max = 6;
  int extend_min = 3;
  int extend_max = 8;
  /// Draws per family before moving to the next one.
  int attempts_per_family = 8;
};

struct NumericPerturbation {
  double value = 0.0;
  PerturbationDescriptor descriptor;
};
/// value × f for f drawn from the scaling factors; throws ZeroValueUnperturbable.
NumericPerturbation perturb_numeric(double value, Rng& rng, const PerturbConfig& config = {});

struct RankPerturbation {
  int rank = 0;
  PerturbationDescriptor descriptor;
};
/// Smallest accepted |Δrank| for n countries.
int min_rank_shift(int n_countries, const PerturbConfig& config = {});
/// Uniform over ranks in [1, n] at least min_rank_shift away; NoFeasibleShift
/// when there are none.
RankPerturbation perturb_rank(int rank, int n_countries, Rng& rng, const PerturbConfig& config = {});

enum class DurationMode { ShiftStart, ShiftEnd, Extend };
std::string_view to_string(DurationMode mode) noexcept;

struct DurationPerturbation {
  int start_year = 0;
  int end_year = 0;
  DurationMode mode = DurationMode::Extend;
  int delta = 0;
  PerturbationDescriptor descriptor;
};
/// Shifts the start earlier or the end later by 2..6 years, or extends the
/// span by 3..8 years keeping its end. Spans only widen, so start < end holds.
/// With `anchor_end` the end year never moves.
DurationPerturbation perturb_duration(int start_year, int end_year, Rng& rng, const PerturbConfig& config = {},
                                      bool anchor_end = false);

/// increase<->decrease, top<->bottom, highest<->lowest; throws UnknownToken.
std::string perturb_binary(const std::string& token);
Direction perturb_binary(Direction direction) noexcept;

/// Families that edit a field present in the claim type.
std::vector<PerturbationFamily> applicable_families(ClaimType type);

/// Rewrites one field of a template-generated true claim so that the claim
/// contradicts the sample's evidence and, when given, every stored row of the
/// sample's measure. Tries the applicable families in random order. Throws
/// UnrecoverableClaimText when the text is not a template, and
/// NoContradiction when no draw contradicts the evidence.
ClaimRecord make_false_claim(const ClaimRecord& true_claim, const DataSample& sample, Rng& rng,
                             const PerturbConfig& config = {}, const std::vector<EvidenceRow>* store_rows = nullptr);

struct PerturbStats {
  std::size_t perturbed = 0;
  std::size_t unrecoverable = 0;
  std::size_t no_contradiction = 0;
  std::map<std::string, std::size_t> by_family;
};

/// One false claim per true claim (1:1), each drawn from a sub-seed of its
/// claim_id. Returns the true claims plus the false ones, sorted by claim_id.
/// `store_rows` maps table_id + "|" + combination label to the measure's rows.
std::vector<ClaimRecord> add_false_claims(const std::vector<ClaimRecord>& true_claims,
                                          const std::map<std::string, const DataSample*>& samples,
                                          std::uint64_t seed, const PerturbConfig& config = {},
                                          PerturbStats* stats = nullptr,
                                          const std::map<std::string, std::vector<EvidenceRow>>* store_rows = nullptr);

}  // namespace statclaim
