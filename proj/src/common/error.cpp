#include "adaptifont/error.hpp"

namespace adaptifont {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kMalformedInput: return "malformed_input";
    case ErrorCode::kInconsistentCorpus: return "inconsistent_corpus";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kGateClosed: return "gate_closed";
    case ErrorCode::kSessionComplete: return "session_complete";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kNumerical: return "numerical_failure";
    case ErrorCode::kReplayMismatch: return "replay_mismatch";
  }
  return "unknown";
}

}  // namespace adaptifont
