#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vesselpose {

enum class ErrorCode {
  kInvalidArgument,
  kMalformed,
  kBadChecksum,
  kIncompleteMultipart,
  kWrongType,
  kMissingHeading,
  kDegenerateGeometry,
  kBehindCamera,
  kNotPoseReady,
  kDegeneratePlanes,
  kNonPositiveHeight,
  kUnrenderable,
  kConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformed: return "Malformed";
    case ErrorCode::kBadChecksum: return "BadChecksum";
    case ErrorCode::kIncompleteMultipart: return "IncompleteMultipart";
    case ErrorCode::kWrongType: return "WrongType";
    case ErrorCode::kMissingHeading: return "MissingHeading";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kNotPoseReady: return "NotPoseReady";
    case ErrorCode::kDegeneratePlanes: return "DegeneratePlanes";
    case ErrorCode::kNonPositiveHeight: return "NonPositiveHeight";
    case ErrorCode::kUnrenderable: return "Unrenderable";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace vesselpose
