#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "statclaim/extract.hpp"

namespace statclaim {

enum class Language { En, Zh, Hi, Es };
std::string_view to_string(Language lang) noexcept;
std::optional<Language> parse_language(std::string_view text) noexcept;

enum class Verdict { True, False, NEI };
std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view text) noexcept;

enum class Generator { Template, Llm };
std::string_view to_string(Generator g) noexcept;

enum class PerturbationFamily { Numeric, Rank, Duration, Binary };
std::string_view to_string(PerturbationFamily f) noexcept;
std::optional<PerturbationFamily> parse_perturbation_family(std::string_view text) noexcept;

struct PerturbationDescriptor {
  PerturbationFamily family = PerturbationFamily::Numeric;
  /// Family-specific knob, e.g. "factor=1.5", "delta=-7", "mode=extend;delta=4",
  /// "increase->decrease".
  std::string params;
  /// Audit copies of the edited field, rendered as text.
  std::string original_value;
  std::string perturbed_value;
  /// Payload field that was edited.
  std::string field;

  bool operator==(const PerturbationDescriptor&) const = default;
};

/// A natural-language claim and its provenance. True claims never carry a
/// perturbation; false claims always do and point at their parent.
struct ClaimRecord {
  std::string claim_id;
  std::string parent_id;
  Language language = Language::En;
  std::string text;
  bool label = true;
  std::string sample_id;
  ClaimType claim_type = ClaimType::HaveTrait;
  std::vector<std::string> table_ids;
  std::optional<PerturbationDescriptor> perturbation;
  Generator generator = Generator::Template;
  /// Hash of the prompt file used for LLM generation; empty for templates.
  std::string prompt_hash;

  bool operator==(const ClaimRecord&) const = default;
};

/// Stable id for a true claim.
std::string make_claim_id(const std::string& sample_id, Language language, Generator generator);

/// Checks the label/perturbation pairing and text/language validity.
std::vector<std::string> check_claim_invariants(const ClaimRecord& claim);

}  // namespace statclaim
