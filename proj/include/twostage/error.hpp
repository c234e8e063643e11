#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twostage {

enum class ErrorCode {
  EmptyForeground,
  BadSide,
  BadImage,
  BadFormat,
  ShapeMismatch,
  BadShape,
  LabelOutOfRange,
  BadMagic,
  VersionMismatch,
  TruncatedFile,
  NonPositiveAccuracy,
  TooFewClasses,
  DegenerateScores,
  TooSmall,
  OutOfBounds,
  EmptyTrainingSet,
  NoTemplates,
  EmptyDataset,
  NoClasses,
  ClassTooSmall,
  ValueOutOfRange,
  InvalidArgument,
  Io,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyForeground: return "EmptyForeground";
    case ErrorCode::BadSide: return "BadSide";
    case ErrorCode::BadImage: return "BadImage";
    case ErrorCode::BadFormat: return "BadFormat";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonPositiveAccuracy: return "NonPositiveAccuracy";
    case ErrorCode::TooFewClasses: return "TooFewClasses";
    case ErrorCode::DegenerateScores: return "DegenerateScores";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::NoTemplates: return "NoTemplates";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NoClasses: return "NoClasses";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

// All library failures are reported through this type. InvariantViolation
// marks a bug rather than bad input; the CLI maps it to exit status 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  // Same error with context prepended to the detail, e.g. a file name.
  Error with_context(const std::string& context) const { return Error(code_, context + ": " + detail_); }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace twostage
