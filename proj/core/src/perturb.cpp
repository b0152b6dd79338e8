#include "statclaim/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"
#include "statclaim/templates.hpp"

namespace statclaim {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string span(int a, int b) { return std::to_string(a) + "-" + std::to_string(b); }

/// One candidate edit: the new claim fields and what changed.
struct Edit {
  ParsedClaim claim;
  PerturbationDescriptor descriptor;
};

Edit numeric_edit(const ParsedClaim& base, const DataSample& sample, Rng& rng, const PerturbConfig& config) {
  Edit e{base, {}};
  std::string* target = nullptr;
  double original = 0;
  std::string field;
  if (const auto* p = std::get_if<HaveTraitPayload>(&sample.payload)) {
    target = &e.claim.value_text;
    original = p->value;
    field = "value";
  } else if (const auto* p = std::get_if<ChangeOverTimePayload>(&sample.payload)) {
    std::vector<std::pair<std::string, double>> fields;
    if (p->value_a != 0) fields.emplace_back("value_a", p->value_a);
    if (p->value_b != 0) fields.emplace_back("value_b", p->value_b);
    if (fields.empty()) throw Error(ErrorCode::ZeroValueUnperturbable, "both values are zero");
    const auto& [name, value] = rng.pick(fields);
    field = name;
    original = value;
    target = name == "value_a" ? &e.claim.value_text : &e.claim.value_b_text;
  } else {
    throw Error(ErrorCode::InvalidArgument, "Numeric perturbation needs a value field");
  }
  auto n = perturb_numeric(original, rng, config);
  *target = format_value(n.value);
  e.descriptor = n.descriptor;
  e.descriptor.field = field;
  e.descriptor.original_value = format_value(original);
  e.descriptor.perturbed_value = *target;
  return e;
}

Edit rank_edit(const ParsedClaim& base, const DataSample& sample, Rng& rng, const PerturbConfig& config) {
  Edit e{base, {}};
  if (const auto* p = std::get_if<TopKPayload>(&sample.payload)) {
    const int absolute = p->direction == Direction::Top ? p->rank : p->n_countries - p->rank + 1;
    auto r = perturb_rank(absolute, p->n_countries, rng, config);
    e.claim.rank_form = true;
    e.claim.rank = r.rank;
    e.descriptor = r.descriptor;
    e.descriptor.field = "rank";
    return e;
  }
  if (const auto* p = std::get_if<ChangeInRankPayload>(&sample.payload)) {
    const bool first = rng.coin();
    auto r = perturb_rank(first ? p->rank_a : p->rank_b, first ? p->n_countries_a : p->n_countries_b, rng,
                          config);
    (first ? e.claim.rank : e.claim.rank_b) = r.rank;
    e.descriptor = r.descriptor;
    e.descriptor.field = first ? "rank_a" : "rank_b";
    return e;
  }
  throw Error(ErrorCode::InvalidArgument, "Rank perturbation needs a rank field");
}

Edit duration_edit(const ParsedClaim& base, const DataSample& sample, Rng& rng, const PerturbConfig& config) {
  Edit e{base, {}};
  if (const auto* p = std::get_if<ConstantChangePayload>(&sample.payload)) {
    auto d = perturb_duration(p->start.year, p->end.year, rng, config, false);
    e.claim.year = d.end_year;
    e.claim.n_years = d.end_year - d.start_year + 1;
    e.descriptor = d.descriptor;
    e.descriptor.field = "span";
    return e;
  }
  if (const auto* p = std::get_if<HistoricalExtremePayload>(&sample.payload)) {
    auto d = perturb_duration(p->year - p->n_years, p->year, rng, config, true);
    e.claim.n_years = d.end_year - d.start_year;
    e.descriptor = d.descriptor;
    e.descriptor.field = "n_years";
    e.descriptor.original_value = std::to_string(p->n_years);
    e.descriptor.perturbed_value = std::to_string(e.claim.n_years);
    return e;
  }
  throw Error(ErrorCode::InvalidArgument, "Duration perturbation needs a span");
}

Edit binary_edit(const ParsedClaim& base) {
  Edit e{base, {}};
  e.descriptor.family = PerturbationFamily::Binary;
  if (base.type == ClaimType::ChangeInRank) {
    std::swap(e.claim.rank, e.claim.rank_b);
    e.descriptor.field = "rank_a,rank_b";
    e.descriptor.params = "swap";
    e.descriptor.original_value = std::to_string(base.rank) + "->" + std::to_string(base.rank_b);
    e.descriptor.perturbed_value = std::to_string(e.claim.rank) + "->" + std::to_string(e.claim.rank_b);
    return e;
  }
  e.claim.direction = perturb_binary(base.direction);
  e.descriptor.field = "direction";
  e.descriptor.original_value = std::string(to_string(base.direction));
  e.descriptor.perturbed_value = std::string(to_string(e.claim.direction));
  e.descriptor.params = e.descriptor.original_value + "->" + e.descriptor.perturbed_value;
  return e;
}

}  // namespace

NumericPerturbation perturb_numeric(double value, Rng& rng, const PerturbConfig& config) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "value must be finite");
  if (value == 0.0) throw Error(ErrorCode::ZeroValueUnperturbable, "zero is invariant under scaling");
  std::vector<double> factors;
  for (double f : config.scaling_factors) {
    if (f != 1.0 && f > 0.0) factors.push_back(f);
  }
  if (factors.empty()) throw Error(ErrorCode::InvalidArgument, "no usable scaling factor");
  const double f = rng.pick(factors);
  NumericPerturbation out;
  out.value = value * f;
  out.descriptor.family = PerturbationFamily::Numeric;
  out.descriptor.params = "factor=" + num(f);
  out.descriptor.field = "value";
  out.descriptor.original_value = num(value);
  out.descriptor.perturbed_value = num(out.value);
  return out;
}

int min_rank_shift(int n_countries, const PerturbConfig& config) {
  const int proportional = static_cast<int>(std::ceil(config.rank_shift_fraction * n_countries - 1e-9));
  return std::max(config.rank_shift_floor, proportional);
}

RankPerturbation perturb_rank(int rank, int n_countries, Rng& rng, const PerturbConfig& config) {
  if (rank < 1 || rank > n_countries) {
    throw Error(ErrorCode::InvalidArgument, "rank " + std::to_string(rank) + " outside [1, " +
                                                std::to_string(n_countries) + "]");
  }
  const int shift = min_rank_shift(n_countries, config);
  std::vector<int> targets;
  for (int r = 1; r <= n_countries; ++r) {
    if (std::abs(r - rank) >= shift) targets.push_back(r);
  }
  if (targets.empty()) {
    throw Error(ErrorCode::NoFeasibleShift, "no rank in [1, " + std::to_string(n_countries) + "] is " +
                                                std::to_string(shift) + " away from " + std::to_string(rank));
  }
  RankPerturbation out;
  out.rank = rng.pick(targets);
  out.descriptor.family = PerturbationFamily::Rank;
  out.descriptor.params = "delta=" + std::to_string(out.rank - rank);
  out.descriptor.field = "rank";
  out.descriptor.original_value = std::to_string(rank);
  out.descriptor.perturbed_value = std::to_string(out.rank);
  return out;
}

std::string_view to_string(DurationMode mode) noexcept {
  switch (mode) {
    case DurationMode::ShiftStart: return "shift_start";
    case DurationMode::ShiftEnd: return "shift_end";
    case DurationMode::Extend: return "extend";
  }
  return "extend";
}

DurationPerturbation perturb_duration(int start_year, int end_year, Rng& rng, const PerturbConfig& config,
                                      bool anchor_end) {
  if (start_year >= end_year) throw Error(ErrorCode::InvalidArgument, "start year must precede end year");
  DurationPerturbation out;
  out.start_year = start_year;
  out.end_year = end_year;
  if (rng.coin()) {
    out.mode = anchor_end || rng.coin() ? DurationMode::ShiftStart : DurationMode::ShiftEnd;
    out.delta = rng.between(config.shift_min, config.shift_max);
    if (out.mode == DurationMode::ShiftStart) {
      out.start_year -= out.delta;
    } else {
      out.end_year += out.delta;
    }
  } else {
    out.mode = DurationMode::Extend;
    out.delta = rng.between(config.extend_min, config.extend_max);
    out.start_year -= out.delta;
  }
  out.descriptor.family = PerturbationFamily::Duration;
  out.descriptor.params = "mode=" + std::string(to_string(out.mode)) + ";delta=" + std::to_string(out.delta);
  out.descriptor.field = "span";
  out.descriptor.original_value = span(start_year, end_year);
  out.descriptor.perturbed_value = span(out.start_year, out.end_year);
  return out;
}

std::string perturb_binary(const std::string& token) {
  auto d = parse_direction(token);
  if (!d) throw Error(ErrorCode::UnknownToken, "not a direction token: " + token);
  return std::string(to_string(perturb_binary(*d)));
}

Direction perturb_binary(Direction direction) noexcept {
  switch (direction) {
    case Direction::Top: return Direction::Bottom;
    case Direction::Bottom: return Direction::Top;
    case Direction::Increase: return Direction::Decrease;
    case Direction::Decrease: return Direction::Increase;
    case Direction::Highest: return Direction::Lowest;
    case Direction::Lowest: return Direction::Highest;
  }
  return direction;
}

std::vector<PerturbationFamily> applicable_families(ClaimType type) {
  using F = PerturbationFamily;
  switch (type) {
    case ClaimType::HaveTrait:
    case ClaimType::ChangeOverTime: return {F::Numeric};
    case ClaimType::TopK: return {F::Binary, F::Rank};
    case ClaimType::ChangeInRank: return {F::Rank, F::Binary};
    case ClaimType::ConstantChange:
    case ClaimType::HistoricalExtreme: return {F::Binary, F::Duration};
  }
  return {};
}

ClaimRecord make_false_claim(const ClaimRecord& true_claim, const DataSample& sample, Rng& rng,
                             const PerturbConfig& config, const std::vector<EvidenceRow>* store_rows) {
  if (!true_claim.label) throw Error(ErrorCode::InvalidArgument, "claim " + true_claim.claim_id + " is already false");
  auto parsed = parse_template(true_claim.text);
  if (!parsed || *parsed != expected_fields(sample)) {
    throw Error(ErrorCode::UnrecoverableClaimText, "cannot locate fields in claim " + true_claim.claim_id);
  }
  auto families = applicable_families(sample.claim_type);
  rng.shuffle(families);
  for (PerturbationFamily family : families) {
    for (int attempt = 0; attempt < config.attempts_per_family; ++attempt) {
      Edit edit;
      try {
        switch (family) {
          case PerturbationFamily::Numeric: edit = numeric_edit(*parsed, sample, rng, config); break;
          case PerturbationFamily::Rank: edit = rank_edit(*parsed, sample, rng, config); break;
          case PerturbationFamily::Duration: edit = duration_edit(*parsed, sample, rng, config); break;
          case PerturbationFamily::Binary: edit = binary_edit(*parsed); break;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ZeroValueUnperturbable || e.code() == ErrorCode::NoFeasibleShift) break;
        throw;
      }
      if (edit.descriptor.original_value == edit.descriptor.perturbed_value) continue;
      auto holds = claim_holds(edit.claim, sample.evidence_rows);
      if (!holds || *holds) continue;
      if (store_rows) {
        auto in_store = claim_holds(edit.claim, *store_rows);
        if (!in_store || *in_store) continue;
      }

      ClaimRecord out = true_claim;
      out.text = render_parsed(edit.claim);
      out.label = false;
      out.parent_id = true_claim.claim_id;
      out.claim_id = "c" + short_hash(true_claim.claim_id + "|false|" + out.text);
      out.perturbation = edit.descriptor;
      return out;
    }
  }
  throw Error(ErrorCode::NoContradiction, "no perturbation of " + true_claim.claim_id + " contradicts its evidence");
}

std::vector<ClaimRecord> add_false_claims(const std::vector<ClaimRecord>& true_claims,
                                          const std::map<std::string, const DataSample*>& samples,
                                          std::uint64_t seed, const PerturbConfig& config, PerturbStats* stats,
                                          const std::map<std::string, std::vector<EvidenceRow>>* store_rows) {
  PerturbStats local;
  std::vector<ClaimRecord> out;
  for (const auto& claim : true_claims) {
    if (!claim.label) continue;
    out.push_back(claim);
    auto it = samples.find(claim.sample_id);
    if (it == samples.end()) {
      ++local.unrecoverable;
      continue;
    }
    Rng rng(derive_seed(seed, "perturb|" + claim.claim_id));
    try {
      const std::vector<EvidenceRow>* rows = nullptr;
      if (store_rows) {
        auto r = store_rows->find(it->second->table_id + "|" + it->second->combination.label());
        if (r != store_rows->end()) rows = &r->second;
      }
      auto f = make_false_claim(claim, *it->second, rng, config, rows);
      ++local.by_family[std::string(to_string(f.perturbation->family))];
      ++local.perturbed;
      out.push_back(std::move(f));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnrecoverableClaimText) {
        ++local.unrecoverable;
      } else if (e.code() == ErrorCode::NoContradiction) {
        ++local.no_contradiction;
      } else {
        throw;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ClaimRecord& a, const ClaimRecord& b) { return a.claim_id < b.claim_id; });
  if (stats) *stats = local;
  return out;
}

}  // namespace statclaim
