#pragma once

#include <stdexcept>
#include <string>

namespace styledrift {

enum class ErrorCode {
  // corpus
  MalformedRecord,
  DuplicateKey,
  DanglingParent,
  EmptySlice,
  // text pipeline
  TextTooShort,
  EmptyText,
  MalformedLexiconLine,
  // markers
  MfwSetWrongSize,
  // statistics
  DegenerateVariance,
  AllZeroDifferences,
  DegenerateInput,
  EmptyGroup,
  MarkerSetMismatch,
  ZeroBaseline,
  // convergence
  ParentMissing,
  EmptyMfwSet,
  // rewrite client
  ProviderError,
  RateLimited,
  EmptyCompletion,
  // generic precondition violation
  InvalidArgument,
};

const char* to_string(ErrorCode code);

// All library errors carry a code so callers can branch without string
// matching. Message text is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::DanglingParent: return "DanglingParent";
    case ErrorCode::EmptySlice: return "EmptySlice";
    case ErrorCode::TextTooShort: return "TextTooShort";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::MalformedLexiconLine: return "MalformedLexiconLine";
    case ErrorCode::MfwSetWrongSize: return "MfwSetWrongSize";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::AllZeroDifferences: return "AllZeroDifferences";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::MarkerSetMismatch: return "MarkerSetMismatch";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::ParentMissing: return "ParentMissing";
    case ErrorCode::EmptyMfwSet: return "EmptyMfwSet";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::EmptyCompletion: return "EmptyCompletion";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace styledrift
