#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adaptifont {

/// Stable, machine-readable failure categories. The service maps these onto
/// HTTP statuses and the `{error: {code, message}}` envelope.
enum class ErrorCode {
  kInvalidArgument,
  kMalformedInput,
  kInconsistentCorpus,
  kDimensionMismatch,
  kOutOfRange,
  kInfeasible,
  kNotFound,
  kConflict,
  kGateClosed,
  kSessionComplete,
  kIo,
  kNumerical,
  kReplayMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace adaptifont
