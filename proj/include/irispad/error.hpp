#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irispad {

enum class ErrorCode {
  // manifest
  DuplicateId,
  UnknownClass,
  MalformedRow,
  InconsistentCorrectness,
  UnknownSample,
  // prompt-engine / mesh
  MissingSalience,
  EmptyFeedback,
  MissingSection,
  BadConfidence,
  BadClassification,
  AttemptsExhausted,
  // client
  RetriesExhausted,
  TransportError,
  AuthError,
  ImageMissing,
  PortInUse,
  BadScript,
  // scoring / stats / fusion
  OutOfRange,
  MissingClass,
  AllZeroDifferences,
  DimensionMismatch,
  DegenerateInput,
  SingleCluster,
  // plumbing
  InvalidArgument,
  Io,
  Config,
  EmptyStore,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. `subject` names the offending
/// entity (a sample id, a class token, a line number) so callers can match
/// on it without parsing `what()`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, std::string detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::string detail_;
};

}  // namespace irispad
