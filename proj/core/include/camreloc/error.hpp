#pragma once

#include <stdexcept>
#include <string>

namespace camreloc {

enum class ErrorCode {
  NonPositiveDepth,
  OutOfBounds,
  SizeMismatch,
  DegenerateImage,
  EmptyOverlap,
  EmptyResult,
  NoProjections,
  NoCorrespondences,
  DegenerateConfiguration,
  AllZeroWeights,
  NoSuccessfulEstimates,
  TooFewSamples,
  EmptyIndex,
  NoCandidates,
  NoReferenceInRadius,
  MissingFile,
  CountMismatch,
  MalformedPose,
  NoRecords,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::EmptyOverlap: return "EmptyOverlap";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::NoProjections: return "NoProjections";
    case ErrorCode::NoCorrespondences: return "NoCorrespondences";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::NoSuccessfulEstimates: return "NoSuccessfulEstimates";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::NoReferenceInRadius: return "NoReferenceInRadius";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::MalformedPose: return "MalformedPose";
    case ErrorCode::NoRecords: return "NoRecords";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace camreloc
