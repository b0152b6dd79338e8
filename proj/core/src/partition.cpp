#include "statclaim/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"
#include "statclaim/random.hpp"

namespace statclaim {

namespace {

std::size_t holdout_count(double fraction, std::size_t tables) {
  auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(tables) - 1e-9));
  return std::clamp<std::size_t>(n, 1, tables - 1);
}

}  // namespace

SplitManifest split(const std::vector<ClaimRecord>& claims, std::uint64_t seed, const SplitOptions& options) {
  if (claims.empty()) throw Error(ErrorCode::InvalidArgument, "no claims to split");
  if (!(options.holdout_fraction > 0.0 && options.holdout_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "holdout fraction must lie in (0, 1)");
  }
  std::set<std::string> table_set;
  for (const auto& c : claims) {
    if (c.table_ids.size() == 1) table_set.insert(c.table_ids.front());
  }
  if (table_set.size() < 2) {
    throw Error(ErrorCode::InsufficientTables, "need at least 2 tables, have " + std::to_string(table_set.size()));
  }
  std::vector<std::string> tables(table_set.begin(), table_set.end());
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(tables);
  tables.resize(holdout_count(options.holdout_fraction, table_set.size()));

  SplitManifest m;
  m.seed = seed;
  m.holdout_tables.insert(tables.begin(), tables.end());
  for (const auto& c : claims) {
    if (c.table_ids.size() != 1) {
      m.discarded_claim_ids.push_back(c.claim_id);
    } else if (m.holdout_tables.count(c.table_ids.front())) {
      m.test_claim_ids.push_back(c.claim_id);
    } else {
      m.train_claim_ids.push_back(c.claim_id);
    }
  }
  std::sort(m.train_claim_ids.begin(), m.train_claim_ids.end());
  std::sort(m.test_claim_ids.begin(), m.test_claim_ids.end());
  if (options.test_cap && m.test_claim_ids.size() > *options.test_cap) {
    m.discarded_claim_ids.insert(m.discarded_claim_ids.end(), m.test_claim_ids.begin() + static_cast<long>(*options.test_cap),
                                 m.test_claim_ids.end());
    m.test_claim_ids.resize(*options.test_cap);
  }
  std::sort(m.discarded_claim_ids.begin(), m.discarded_claim_ids.end());
  return m;
}

std::vector<std::string> check_split(const SplitManifest& m, const std::vector<ClaimRecord>& claims,
                                     double holdout_fraction) {
  std::vector<std::string> v;
  std::map<std::string, const ClaimRecord*> by_id;
  std::set<std::string> tables;
  for (const auto& c : claims) {
    by_id[c.claim_id] = &c;
    if (c.table_ids.size() == 1) tables.insert(c.table_ids.front());
  }
  const auto needed = static_cast<std::size_t>(std::ceil(holdout_fraction * static_cast<double>(tables.size()) - 1e-9));
  if (m.holdout_tables.size() < needed) v.push_back("holdout below fraction");

  std::set<std::string> train_tables, test_tables;
  std::multiset<std::string> seen;
  auto route = [&](const std::vector<std::string>& ids, std::set<std::string>* table_out, bool holdout) {
    for (const auto& id : ids) {
      seen.insert(id);
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        v.push_back("unknown claim " + id);
        continue;
      }
      if (!table_out) continue;
      for (const auto& t : it->second->table_ids) {
        table_out->insert(t);
        if (m.holdout_tables.count(t) != static_cast<std::size_t>(holdout)) {
          v.push_back("claim " + id + " routed against its table");
        }
      }
    }
  };
  route(m.train_claim_ids, &train_tables, false);
  route(m.test_claim_ids, &test_tables, true);
  route(m.discarded_claim_ids, nullptr, false);
  for (const auto& t : train_tables) {
    if (test_tables.count(t)) v.push_back("table " + t + " in both train and test");
  }
  for (const auto& c : claims) {
    const auto n = seen.count(c.claim_id);
    if (n != 1) v.push_back("claim " + c.claim_id + " appears " + std::to_string(n) + " times");
  }
  if (seen.size() != claims.size()) v.push_back("partition size differs from claim count");
  return v;
}

nlohmann::json to_json(const SplitManifest& m) {
  return {{"seed", m.seed},
          {"holdout_tables", std::vector<std::string>(m.holdout_tables.begin(), m.holdout_tables.end())},
          {"train_claim_ids", m.train_claim_ids},
          {"test_claim_ids", m.test_claim_ids},
          {"discarded_claim_ids", m.discarded_claim_ids}};
}

SplitManifest split_from_json(const nlohmann::json& j) {
  SplitManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& t : j.at("holdout_tables")) m.holdout_tables.insert(t.get<std::string>());
  m.train_claim_ids = j.at("train_claim_ids").get<std::vector<std::string>>();
  m.test_claim_ids = j.at("test_claim_ids").get<std::vector<std::string>>();
  m.discarded_claim_ids = j.at("discarded_claim_ids").get<std::vector<std::string>>();
  return m;
}

}  // namespace statclaim
