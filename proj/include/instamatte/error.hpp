#pragma once

#include <stdexcept>
#include <string>

namespace instamatte {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  MalformedTrimap,
  EmptyMask,
  DegenerateAlpha,
  ImageTooSmall,
  InvalidRequest,
  NonConvergence,
  BackendFailure,
  NoUnknownRegion,
  UncoveredUnknownPixel,
  EmptyRegion,
  ForegroundTooLarge,
  SchemaViolation,
  DuplicateId,
  RleLengthMismatch,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the pipeline; carries the instance and pass in which a stage failed.
class StageError : public Error {
 public:
  StageError(ErrorCode code, std::string instance_id, int pass, const std::string& what)
      : Error(code, "instance " + instance_id + ", pass " + std::to_string(pass) + ": " + what),
        instance_id_(std::move(instance_id)),
        pass_(pass) {}

  const std::string& instance_id() const noexcept { return instance_id_; }
  int pass() const noexcept { return pass_; }

 private:
  std::string instance_id_;
  int pass_;
};

}  // namespace instamatte
