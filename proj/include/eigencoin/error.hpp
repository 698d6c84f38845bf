#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace eigencoin {

enum class ErrorKind {
  InvalidParameter,
  DimensionError,
  SegmentationFailure,
  InvalidDataset,
  LoadError,
  UndefinedRate,
  PredictionFailure,
  FormatError,
  InvariantViolation,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DimensionError: return "dimension-error";
    case ErrorKind::SegmentationFailure: return "segmentation-failure";
    case ErrorKind::InvalidDataset: return "invalid-dataset";
    case ErrorKind::LoadError: return "load-error";
    case ErrorKind::UndefinedRate: return "undefined-rate";
    case ErrorKind::PredictionFailure: return "prediction-failure";
    case ErrorKind::FormatError: return "format-error";
    case ErrorKind::InvariantViolation: return "invariant-violation";
  }
  return "unknown";
}

/// Base of every error thrown by the library. The kind selects the CLI exit
/// code; the message is meant for a human.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class InvalidParameter : public Error {
public:
  explicit InvalidParameter(const std::string& what)
      : Error(ErrorKind::InvalidParameter, what) {}
};

class DimensionError : public Error {
public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::DimensionError, what) {}
};

/// Raised by the ROI pipeline; `stage()` names the step that produced an
/// empty result.
class SegmentationFailure : public Error {
public:
  SegmentationFailure(std::string stage, const std::string& what)
      : Error(ErrorKind::SegmentationFailure, what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

class InvalidDataset : public Error {
public:
  explicit InvalidDataset(const std::string& what)
      : Error(ErrorKind::InvalidDataset, what) {}
};

class LoadError : public Error {
public:
  explicit LoadError(const std::string& what)
      : Error(ErrorKind::LoadError, what) {}
};

class UndefinedRate : public Error {
public:
  explicit UndefinedRate(const std::string& what)
      : Error(ErrorKind::UndefinedRate, what) {}
};

class PredictionFailure : public Error {
public:
  PredictionFailure(std::string stage, const std::string& what)
      : Error(ErrorKind::PredictionFailure, what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

class FormatError : public Error {
public:
  explicit FormatError(const std::string& what)
      : Error(ErrorKind::FormatError, what) {}
};

class InvariantViolation : public Error {
public:
  explicit InvariantViolation(const std::string& what)
      : Error(ErrorKind::InvariantViolation, what) {}
};

}  // namespace eigencoin
