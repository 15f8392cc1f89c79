#pragma once

#include <stdexcept>
#include <string>

namespace signbench {

// Every failure the library reports carries one of these codes. The CLI maps
// code families to distinct process exit codes (see tools/signbench.cpp).
enum class ErrorCode {
  // config / parsing
  ConfigError,
  ParseError,
  // filesystem
  IoError,
  // dataset ingestion
  DuplicateClass,
  ClassCountMismatch,
  EmptyClass,
  EmptyDataset,
  ImageDecodeError,
  // preprocessing transforms
  InfeasibleUnderSampling,
  InfeasibleOverSampling,
  StratificationError,
  ChannelPolicyError,
  // models
  WeightLoadError,
  FreezePolicyError,
  InputShapeError,
  ShapeError,
  // training
  EmptySplit,
  DivergenceError,
  LabelRangeError,
  // evaluation / reporting
  LengthMismatch,
  DatasetKeyError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateClass: return "DuplicateClass";
    case ErrorCode::ClassCountMismatch: return "ClassCountMismatch";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::ImageDecodeError: return "ImageDecodeError";
    case ErrorCode::InfeasibleUnderSampling: return "InfeasibleUnderSampling";
    case ErrorCode::InfeasibleOverSampling: return "InfeasibleOverSampling";
    case ErrorCode::StratificationError: return "StratificationError";
    case ErrorCode::ChannelPolicyError: return "ChannelPolicyError";
    case ErrorCode::WeightLoadError: return "WeightLoadError";
    case ErrorCode::FreezePolicyError: return "FreezePolicyError";
    case ErrorCode::InputShapeError: return "InputShapeError";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::DivergenceError: return "DivergenceError";
    case ErrorCode::LabelRangeError: return "LabelRangeError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DatasetKeyError: return "DatasetKeyError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace signbench
