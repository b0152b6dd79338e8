#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "statclaim/claims.hpp"

namespace statclaim {

struct SplitManifest {
  std::set<std::string> holdout_tables;
  std::vector<std::string> train_claim_ids;
  std::vector<std::string> test_claim_ids;
  std::vector<std::string> discarded_claim_ids;
  std::uint64_t seed = 0;
};

struct SplitOptions {
  double holdout_fraction = 0.10;
  /// Test claims beyond this count (lowest claim_ids kept) go to the discard pile.
  std::optional<std::size_t> test_cap;
};

/// Holds out ceil(fraction × tables) tables, sampled uniformly without
/// replacement; their claims form the test set. Claims that name anything
/// other than exactly one table are discarded. Throws InsufficientTables
/// with fewer than two tables.
SplitManifest split(const std::vector<ClaimRecord>& claims, std::uint64_t seed, const SplitOptions& options = {});

/// Violations of the manifest invariants against the claims it was built from.
std::vector<std::string> check_split(const SplitManifest& manifest, const std::vector<ClaimRecord>& claims,
                                     double holdout_fraction = 0.10);

nlohmann::json to_json(const SplitManifest& manifest);
SplitManifest split_from_json(const nlohmann::json& j);

}  // namespace statclaim
