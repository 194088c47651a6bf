#ifndef MMEAN_ERRORS_HPP
#define MMEAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmean {

enum class ErrorCode {
  RankDeficient,
  DimensionMismatch,
  FullSpace,
  WeightError,
  SpectralGapTooSmall,
  BeyondInjectivity,
  NotUnique,
  NoConvergence,
  LeftTube,
  NotPositive,
  NoSignChange,
  EpsilonTooLarge,
  ParseError,
  ValidationError,
  IoError,
  UnsupportedFormat,
  Unsupported,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FullSpace: return "FullSpace";
    case ErrorCode::WeightError: return "WeightError";
    case ErrorCode::SpectralGapTooSmall: return "SpectralGapTooSmall";
    case ErrorCode::BeyondInjectivity: return "BeyondInjectivity";
    case ErrorCode::NotUnique: return "NotUnique";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::LeftTube: return "LeftTube";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mmean

#endif
