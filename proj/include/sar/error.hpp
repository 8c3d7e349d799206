#pragma once

#include <stdexcept>
#include <string>

namespace sar {

enum class ErrorCode {
  kNoCrossing,
  kAmbiguous,
  kTargetAboveSensor,
  kNoIntersection,
  kInvalidParams,
  kLengthMismatch,
  kDegenerateIncidence,
  kTargetOutOfWindow,
  kBeamMiss,
  kModeUnsupported,
  kDopplerOverflow,
  kGridOutsideCollection,
  kWindowedInput,
  kSpacingUnreachable,
  kSaturationExceeded,
  kAllZeroInput,
  kMissingCalibration,
  kPatternOutOfDomain,
  kNonInvertible,
  kTooFewReflectors,
  kBackgroundTooHigh,
  kRegionContaminated,
  kPeakOnEdge,
  kMultiplePeaks,
  kNoSidelobeFound,
  kSpanExceedsChip,
  kMainlobeClipped,
  kTooFew,
  kConfigInvalid,
  kIoError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoCrossing: return "NoCrossing";
    case ErrorCode::kAmbiguous: return "Ambiguous";
    case ErrorCode::kTargetAboveSensor: return "TargetAboveSensor";
    case ErrorCode::kNoIntersection: return "NoIntersection";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateIncidence: return "DegenerateIncidence";
    case ErrorCode::kTargetOutOfWindow: return "TargetOutOfWindow";
    case ErrorCode::kBeamMiss: return "BeamMiss";
    case ErrorCode::kModeUnsupported: return "ModeUnsupported";
    case ErrorCode::kDopplerOverflow: return "DopplerOverflow";
    case ErrorCode::kGridOutsideCollection: return "GridOutsideCollection";
    case ErrorCode::kWindowedInput: return "WindowedInput";
    case ErrorCode::kSpacingUnreachable: return "SpacingUnreachable";
    case ErrorCode::kSaturationExceeded: return "SaturationExceeded";
    case ErrorCode::kAllZeroInput: return "AllZeroInput";
    case ErrorCode::kMissingCalibration: return "MissingCalibration";
    case ErrorCode::kPatternOutOfDomain: return "PatternOutOfDomain";
    case ErrorCode::kNonInvertible: return "NonInvertible";
    case ErrorCode::kTooFewReflectors: return "TooFewReflectors";
    case ErrorCode::kBackgroundTooHigh: return "BackgroundTooHigh";
    case ErrorCode::kRegionContaminated: return "RegionContaminated";
    case ErrorCode::kPeakOnEdge: return "PeakOnEdge";
    case ErrorCode::kMultiplePeaks: return "MultiplePeaks";
    case ErrorCode::kNoSidelobeFound: return "NoSidelobeFound";
    case ErrorCode::kSpanExceedsChip: return "SpanExceedsChip";
    case ErrorCode::kMainlobeClipped: return "MainlobeClipped";
    case ErrorCode::kTooFew: return "TooFew";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

} // namespace sar
