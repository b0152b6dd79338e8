#pragma once

#include <optional>
#include <string>
#include <vector>

#include "statclaim/claims.hpp"
#include "statclaim/extract.hpp"

namespace statclaim {

/// Numbers as they appear in claim text: |v| >= 100 as an integer, 1 <= |v| < 100
/// with two decimals, smaller magnitudes with two significant digits; trailing
/// zeros are trimmed.
std::string format_value(double value);

/// Whether `stated` is `actual` up to display rounding (or 0.5% relative).
bool values_agree(double stated, double actual);

std::string ordinal(int n);

/// Phrase naming the measure: the combination's values, else the table id.
std::string measure_phrase(const DataSample& sample);

/// English template for the sample's claim type. Throws
/// UnsupportedTemplateLanguage for any other language.
std::string render_template(const DataSample& sample, Language language = Language::En);

/// TopK claims that state an explicit rank ("X ranked 14th on M in Y.").
std::string render_top_k_rank_form(const DataSample& sample, int rank);

/// Fields recovered from a rendered English claim.
struct ParsedClaim {
  ClaimType type = ClaimType::HaveTrait;
  bool rank_form = false;  // TopK stated as an explicit rank
  std::string country;
  std::string measure;
  Direction direction = Direction::Top;
  int year = 0;    // TopK, HistoricalExtreme, HaveTrait, ConstantChange end year
  int year_b = 0;  // ChangeInRank / ChangeOverTime second year; year holds the first
  int k = 0;
  int rank = 0;    // TopK rank form, ChangeInRank rank_a
  int rank_b = 0;
  int n_years = 0;
  std::string value_text;  // HaveTrait value, ChangeOverTime value_a
  std::string value_b_text;

  bool operator==(const ParsedClaim&) const = default;
};

/// Recognizes every template produced by render_template and the TopK rank
/// form; nullopt for free text.
std::optional<ParsedClaim> parse_template(const std::string& text);

/// Parsed view of a sample's payload, as render_template would state it.
ParsedClaim expected_fields(const DataSample& sample);

/// Inverse of parse_template.
std::string render_parsed(const ParsedClaim& claim);

/// Evaluates a claim against observation rows of its measure. nullopt when
/// the rows say nothing about the claimed country/year; false when the rows
/// contradict the claim or lack the years it asserts.
std::optional<bool> claim_holds(const ParsedClaim& claim, const std::vector<EvidenceRow>& rows);

}  // namespace statclaim
