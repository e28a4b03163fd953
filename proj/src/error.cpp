#include "irispad/error.hpp"

namespace irispad {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InconsistentCorrectness: return "InconsistentCorrectness";
    case ErrorCode::UnknownSample: return "UnknownSample";
    case ErrorCode::MissingSalience: return "MissingSalience";
    case ErrorCode::EmptyFeedback: return "EmptyFeedback";
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::BadConfidence: return "BadConfidence";
    case ErrorCode::BadClassification: return "BadClassification";
    case ErrorCode::AttemptsExhausted: return "AttemptsExhausted";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::ImageMissing: return "ImageMissing";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::BadScript: return "BadScript";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::AllZeroDifferences: return "AllZeroDifferences";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
    case ErrorCode::EmptyStore: return "EmptyStore";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& subject,
                    const std::string& detail) {
  std::string out(to_string(code));
  out += '(';
  out += subject;
  out += ')';
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string subject, std::string detail)
    : std::runtime_error(compose(code, subject, detail)),
      code_(code),
      subject_(std::move(subject)),
      detail_(std::move(detail)) {}

}  // namespace irispad
