#include <gtest/gtest.h>

#include "statclaim/error.hpp"
#include "statclaim/templates.hpp"
#include "support.hpp"

using namespace statclaim;

namespace {

const MeasureCombination kGdp{{{"MEASURE", "GDP per capita"}}};

DataSample sample(Payload p, std::vector<EvidenceRow> evidence = {}) {
  return make_sample("GDP", kGdp, std::move(p), std::move(evidence));
}

}  // namespace

TEST(FormatValue, DisplayRounding) {
  EXPECT_EQ(format_value(1234.6), "1235");
  EXPECT_EQ(format_value(100.0), "100");
  EXPECT_EQ(format_value(3.4), "3.4");
  EXPECT_EQ(format_value(3.456), "3.46");
  EXPECT_EQ(format_value(12.0), "12");
  EXPECT_EQ(format_value(0.01234), "0.012");
  EXPECT_EQ(format_value(-0.0), "0");
  EXPECT_EQ(format_value(-45.5), "-45.5");
}

TEST(FormatValue, AgreementTolerance) {
  EXPECT_TRUE(values_agree(3.46, 3.456));
  EXPECT_TRUE(values_agree(1235, 1234.6));
  EXPECT_TRUE(values_agree(1000, 1004));  // 0.4% relative
  EXPECT_FALSE(values_agree(3.5, 3.456));
  EXPECT_FALSE(values_agree(5, 10));
}

TEST(Ordinal, Suffixes) {
  EXPECT_EQ(ordinal(1), "1st");
  EXPECT_EQ(ordinal(2), "2nd");
  EXPECT_EQ(ordinal(3), "3rd");
  EXPECT_EQ(ordinal(11), "11th");
  EXPECT_EQ(ordinal(13), "13th");
  EXPECT_EQ(ordinal(22), "22nd");
  EXPECT_EQ(ordinal(104), "104th");
}

TEST(Render, TopK) {
  const auto s = sample(TopKPayload{"Sweden", 2019, 5, Direction::Top, 2, 51.2, 60});
  EXPECT_EQ(render_template(s), "Sweden was among the top 5 countries on GDP per capita in 2019.");
  EXPECT_EQ(render_top_k_rank_form(s, 14), "Sweden ranked 14th among countries on GDP per capita in 2019.");
}

TEST(Render, HaveTrait) {
  EXPECT_EQ(render_template(sample(HaveTraitPayload{"France", 2015, 3.4})),
            "France recorded 3.4 on GDP per capita in 2015.");
}

TEST(Render, OtherTypes) {
  EXPECT_EQ(render_template(sample(ConstantChangePayload{"Chile", Direction::Increase, 9, {2001, 1}, {2009, 9}})),
            "Chile has shown a constant increase on GDP per capita for 9 consecutive years, as of 2009.");
  EXPECT_EQ(render_template(sample(HistoricalExtremePayload{"Peru", 2012, 8.0, Direction::Lowest, 11})),
            "In 2012, Peru recorded its lowest value on GDP per capita in the last 11 years.");
  EXPECT_EQ(render_template(sample(ChangeInRankPayload{"Iran", 2005, 2015, 30, 12, 40, 41, 1, 2})),
            "Iran went from rank 30 to rank 12 on GDP per capita between 2005 and 2015.");
  EXPECT_EQ(render_template(sample(ChangeOverTimePayload{"Iran", 2005, 2015, 1234.4, 0.5})),
            "Iran went from 1234 to 0.5 on GDP per capita between 2005 and 2015.");
}

TEST(Render, MeasureFallsBackToTableId) {
  const auto s = make_sample("NAMA", {}, HaveTraitPayload{"X", 2000, 1.0}, {});
  EXPECT_EQ(measure_phrase(s), "NAMA");
}

TEST(Render, NonEnglishThrows) {
  const auto s = sample(HaveTraitPayload{"France", 2015, 3.4});
  try {
    render_template(s, Language::Zh);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedTemplateLanguage);
  }
}

TEST(Parse, FreeTextIsNotATemplate) {
  EXPECT_FALSE(parse_template("Sweden is quite rich.").has_value());
  EXPECT_FALSE(parse_template("").has_value());
}

TEST(Parse, RankFormRoundTrip) {
  const auto s = sample(TopKPayload{"Sweden", 2019, 5, Direction::Top, 2, 51.2, 60});
  const auto parsed = parse_template(render_top_k_rank_form(s, 23));
  ASSERT_TRUE(parsed);
  EXPECT_TRUE(parsed->rank_form);
  EXPECT_EQ(parsed->rank, 23);
  EXPECT_EQ(render_parsed(*parsed), render_top_k_rank_form(s, 23));
}

TEST(ClaimHolds, TopKAgainstRows) {
  std::vector<EvidenceRow> rows;
  for (int i = 0; i < 20; ++i) rows.push_back({"C" + std::to_string(10 + i), 2000, static_cast<double>(i)});
  ParsedClaim c;
  c.type = ClaimType::TopK;
  c.country = "C29";
  c.direction = Direction::Top;
  c.k = 3;
  c.year = 2000;
  EXPECT_EQ(claim_holds(c, rows), true);
  c.direction = Direction::Bottom;
  EXPECT_EQ(claim_holds(c, rows), false);
  c.year = 2001;
  EXPECT_EQ(claim_holds(c, rows), std::nullopt);
  c.country = "Nowhere";
  EXPECT_EQ(claim_holds(c, rows), std::nullopt);
}

TEST(ClaimHolds, ConstantChangeNeedsEveryYear) {
  ParsedClaim c;
  c.type = ClaimType::ConstantChange;
  c.country = "A";
  c.direction = Direction::Increase;
  c.year = 2004;
  c.n_years = 5;
  std::vector<EvidenceRow> rows{{"A", 2000, 1}, {"A", 2001, 2}, {"A", 2002, 3}, {"A", 2003, 4}, {"A", 2004, 5}};
  EXPECT_EQ(claim_holds(c, rows), true);
  rows.erase(rows.begin() + 2);
  EXPECT_EQ(claim_holds(c, rows), false);
}

// Every fixture sample renders, parses back to its own fields and holds on
// its own evidence.
TEST(RoundTrip, FixtureSamples) {
  statclaim::testing::TempDir dir;
  FixtureConfig cfg;
  cfg.n_tables = 2;
  cfg.n_countries = 55;
  const auto fx = statclaim::testing::prepare_fixture(cfg, dir.path());
  ASSERT_FALSE(fx.samples.empty());
  for (const auto& s : fx.samples) {
    const auto text = render_template(s);
    const auto parsed = parse_template(text);
    ASSERT_TRUE(parsed) << text;
    EXPECT_EQ(*parsed, expected_fields(s)) << text;
    EXPECT_EQ(render_parsed(*parsed), text);
    EXPECT_EQ(claim_holds(*parsed, s.evidence_rows), true) << text;
  }
}
