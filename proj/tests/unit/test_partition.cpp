#include <gtest/gtest.h>

#include "statclaim/error.hpp"
#include "statclaim/partition.hpp"

using namespace statclaim;

namespace {

std::vector<ClaimRecord> claims_over(int tables, int per_table) {
  std::vector<ClaimRecord> out;
  for (int t = 0; t < tables; ++t) {
    for (int i = 0; i < per_table; ++i) {
      ClaimRecord c;
      c.claim_id = "c" + std::to_string(t) + "_" + std::to_string(i);
      c.table_ids = {"T" + std::to_string(t)};
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

TEST(Split, TwentyTablesHoldOutTwo) {
  const auto claims = claims_over(20, 5);
  const auto m = split(claims, 1);
  EXPECT_EQ(m.holdout_tables.size(), 2u);
  EXPECT_EQ(m.test_claim_ids.size(), 10u);
  EXPECT_EQ(m.train_claim_ids.size(), 90u);
  EXPECT_TRUE(check_split(m, claims).empty());
}

TEST(Split, HoldoutRoundsUpAndLeavesTraining) {
  EXPECT_EQ(split(claims_over(11, 1), 1).holdout_tables.size(), 2u);
  EXPECT_EQ(split(claims_over(2, 1), 1).holdout_tables.size(), 1u);
  SplitOptions most;
  most.holdout_fraction = 0.99;
  EXPECT_EQ(split(claims_over(5, 1), 1, most).holdout_tables.size(), 4u);
}

TEST(Split, OneTableIsInsufficient) {
  try {
    split(claims_over(1, 10), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientTables);
  }
}

TEST(Split, BadFractionRejected) {
  SplitOptions o;
  o.holdout_fraction = 0.0;
  EXPECT_THROW(split(claims_over(4, 1), 1, o), Error);
  o.holdout_fraction = 1.0;
  EXPECT_THROW(split(claims_over(4, 1), 1, o), Error);
}

TEST(Split, SeedDeterminesManifest) {
  const auto claims = claims_over(30, 3);
  EXPECT_EQ(to_json(split(claims, 5)), to_json(split(claims, 5)));
  bool differs = false;
  for (std::uint64_t s = 6; s < 12; ++s) differs = differs || split(claims, s).holdout_tables != split(claims, 5).holdout_tables;
  EXPECT_TRUE(differs);
}

TEST(Split, InputOrderDoesNotMatter) {
  auto claims = claims_over(15, 4);
  const auto a = split(claims, 3);
  std::reverse(claims.begin(), claims.end());
  EXPECT_EQ(to_json(split(claims, 3)), to_json(a));
}

TEST(Split, TestCapDiscardsOverflow) {
  const auto claims = claims_over(10, 8);
  SplitOptions o;
  o.test_cap = 3;
  const auto m = split(claims, 2, o);
  EXPECT_EQ(m.test_claim_ids.size(), 3u);
  EXPECT_EQ(m.discarded_claim_ids.size(), 5u);
  EXPECT_TRUE(check_split(m, claims).empty());
}

TEST(Split, MultiTableClaimsAreDiscarded) {
  auto claims = claims_over(4, 2);
  ClaimRecord both;
  both.claim_id = "zz";
  both.table_ids = {"T0", "T1"};
  claims.push_back(both);
  const auto m = split(claims, 1);
  EXPECT_EQ(m.discarded_claim_ids, std::vector<std::string>{"zz"});
  EXPECT_TRUE(check_split(m, claims).empty());
}

TEST(Split, CheckerCatchesLeaks) {
  const auto claims = claims_over(10, 2);
  auto m = split(claims, 1);
  m.train_claim_ids.push_back(m.test_claim_ids.front());
  EXPECT_FALSE(check_split(m, claims).empty());
  auto dropped = split(claims, 1);
  dropped.train_claim_ids.pop_back();
  EXPECT_FALSE(check_split(dropped, claims).empty());
}

TEST(Split, JsonRoundTrip) {
  SplitOptions o;
  o.test_cap = 4;
  const auto m = split(claims_over(12, 6), 77, o);
  const auto back = split_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.holdout_tables, m.holdout_tables);
  EXPECT_EQ(back.train_claim_ids, m.train_claim_ids);
  EXPECT_EQ(back.test_claim_ids, m.test_claim_ids);
  EXPECT_EQ(back.discarded_claim_ids, m.discarded_claim_ids);
}
