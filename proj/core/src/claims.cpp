#include "statclaim/claims.hpp"

#include "statclaim/hashing.hpp"

namespace statclaim {

std::string_view to_string(Language lang) noexcept {
  switch (lang) {
    case Language::En: return "en";
    case Language::Zh: return "zh";
    case Language::Hi: return "hi";
    case Language::Es: return "es";
  }
  return "en";
}

std::optional<Language> parse_language(std::string_view text) noexcept {
  for (auto l : {Language::En, Language::Zh, Language::Hi, Language::Es}) {
    if (to_string(l) == text) return l;
  }
  return std::nullopt;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::True: return "True";
    case Verdict::False: return "False";
    case Verdict::NEI: return "NEI";
  }
  return "NEI";
}

std::optional<Verdict> parse_verdict(std::string_view text) noexcept {
  for (auto v : {Verdict::True, Verdict::False, Verdict::NEI}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

std::string_view to_string(Generator g) noexcept {
  return g == Generator::Template ? "template" : "llm";
}

std::string_view to_string(PerturbationFamily f) noexcept {
  switch (f) {
    case PerturbationFamily::Numeric: return "Numeric";
    case PerturbationFamily::Rank: return "Rank";
    case PerturbationFamily::Duration: return "Duration";
    case PerturbationFamily::Binary: return "Binary";
  }
  return "Numeric";
}

std::optional<PerturbationFamily> parse_perturbation_family(std::string_view text) noexcept {
  for (auto f : {PerturbationFamily::Numeric, PerturbationFamily::Rank, PerturbationFamily::Duration,
                 PerturbationFamily::Binary}) {
    if (to_string(f) == text) return f;
  }
  return std::nullopt;
}

std::string make_claim_id(const std::string& sample_id, Language language, Generator generator) {
  return "c" + short_hash(sample_id + "|" + std::string(to_string(language)) + "|" +
                          std::string(to_string(generator)));
}

std::vector<std::string> check_claim_invariants(const ClaimRecord& claim) {
  std::vector<std::string> v;
  if (claim.text.empty()) v.push_back("empty text");
  if (claim.label && claim.perturbation) v.push_back("true claim carries a perturbation");
  if (!claim.label && !claim.perturbation) v.push_back("false claim lacks a perturbation");
  if (!claim.label && claim.parent_id.empty()) v.push_back("false claim lacks parent_id");
  if (claim.claim_id.empty()) v.push_back("empty claim_id");
  return v;
}

}  // namespace statclaim
