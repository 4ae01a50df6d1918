#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rxo {

enum class ErrorCode {
  // relational core
  UnknownRelvar,
  UnknownAttribute,
  SchemaMismatch,
  TypeError,
  DivisionByZero,
  // machine
  DuplicateName,
  CyclicDefinition,
  VirtualTargetNotUpdatable,
  KeyViolation,
  ForeignKeyViolation,
  UnknownTransaction,
  ArgumentMismatch,
  AssertionFailed,
  IoError,
  FormatError,
  // parsers
  SyntaxError,
  UnterminatedCommand,
  // catalog
  DuplicateClass,
  UnknownParent,
  MemberConflict,
  UnknownReferencedClass,
  UnknownName,
  IllegalContinuation,
  NonScalarInCondition,
  UnknownMember,
  KindMismatch,
  AmbiguousImplementation,
  // translator
  NotUpdatableCalculated,
  NonTerminalProjection,
  CyclicBinding,
  LoopLimitExceeded,
  NotFullyImplemented,
  FirstOfCardinality,
  UnknownMethod,
  Unsupported,
  // session
  UsageError,
};

std::string_view to_string(ErrorCode code);
/// Inverse of to_string; false when `name` is not an error code.
bool error_code_from_name(std::string_view name, ErrorCode& out);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

} // namespace rxo
