#include "statclaim/error.hpp"

namespace statclaim {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::MissingObsValueColumn: return "MissingObsValueColumn";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateTableId: return "DuplicateTableId";
    case ErrorCode::AmbiguousRole: return "AmbiguousRole";
    case ErrorCode::UnknownTable: return "UnknownTable";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::SqlSyntaxError: return "SqlSyntaxError";
    case ErrorCode::SqlRejectedWrite: return "SqlRejectedWrite";
    case ErrorCode::NoReferenceArea: return "NoReferenceArea";
    case ErrorCode::NoValidWindow: return "NoValidWindow";
    case ErrorCode::UnsupportedTemplateLanguage: return "UnsupportedTemplateLanguage";
    case ErrorCode::AdapterUnavailable: return "AdapterUnavailable";
    case ErrorCode::EmptyGeneration: return "EmptyGeneration";
    case ErrorCode::UnparseableVerdict: return "UnparseableVerdict";
    case ErrorCode::ZeroValueUnperturbable: return "ZeroValueUnperturbable";
    case ErrorCode::NoFeasibleShift: return "NoFeasibleShift";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::UnrecoverableClaimText: return "UnrecoverableClaimText";
    case ErrorCode::NoContradiction: return "NoContradiction";
    case ErrorCode::InsufficientTables: return "InsufficientTables";
    case ErrorCode::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::AllAttemptsFailed: return "AllAttemptsFailed";
    case ErrorCode::MissingGold: return "MissingGold";
  }
  return "Unknown";
}

namespace {
std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<long> line) {
  std::string out(to_string(code));
  if (line) out += " (line " + std::to_string(*line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<long> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), message_(message), line_(line) {}

}  // namespace statclaim
