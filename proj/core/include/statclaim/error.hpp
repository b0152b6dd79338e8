#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace statclaim {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  // table_store
  MissingObsValueColumn,
  MalformedRow,
  DuplicateTableId,
  AmbiguousRole,
  UnknownTable,
  UnknownColumn,
  SqlSyntaxError,
  SqlRejectedWrite,
  // preprocess
  NoReferenceArea,
  NoValidWindow,
  // claimgen
  UnsupportedTemplateLanguage,
  AdapterUnavailable,
  EmptyGeneration,
  UnparseableVerdict,
  // perturb
  ZeroValueUnperturbable,
  NoFeasibleShift,
  UnknownToken,
  UnrecoverableClaimText,
  NoContradiction,
  // partition
  InsufficientTables,
  // verifier
  ScorerUnavailable,
  AllAttemptsFailed,
  // eval
  MissingGold,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` is the stable
/// discriminator; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<long> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// Source line for MalformedRow, when known.
  std::optional<long> line() const noexcept { return line_; }
  /// The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<long> line_;
};

}  // namespace statclaim
