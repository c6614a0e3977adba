#pragma once

#include <stdexcept>
#include <string>

namespace dyad {

// Error codes. Values mirror dyad_status in include/dyadnet.h; the C API
// layer static-asserts the correspondence.
enum class Err : int {
  Ok = 0,
  Io = 1,
  EmptyFile = 2,
  MalformedRow = 3,
  UnknownLabel = 4,
  NonMonotonicTime = 5,
  EmptySplit = 6,
  EmptyInput = 7,
  ShapeMismatch = 8,
  EmptySequence = 9,
  InvalidTarget = 10,
  UnknownModelName = 11,
  CorruptModelFile = 12,
  InvalidProfile = 13,
  LabelOutOfSpace = 14,
  InvalidArgument = 15,
  Internal = 16,
  SelftestFailed = 17,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::Ok: return "Ok";
    case Err::Io: return "IoError";
    case Err::EmptyFile: return "EmptyFile";
    case Err::MalformedRow: return "MalformedRow";
    case Err::UnknownLabel: return "UnknownLabel";
    case Err::NonMonotonicTime: return "NonMonotonicTime";
    case Err::EmptySplit: return "EmptySplit";
    case Err::EmptyInput: return "EmptyInput";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::EmptySequence: return "EmptySequence";
    case Err::InvalidTarget: return "InvalidTarget";
    case Err::UnknownModelName: return "UnknownModelName";
    case Err::CorruptModelFile: return "CorruptModelFile";
    case Err::InvalidProfile: return "InvalidProfile";
    case Err::LabelOutOfSpace: return "LabelOutOfSpace";
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::Internal: return "Internal";
    case Err::SelftestFailed: return "SelftestFailed";
  }
  return "Internal";
}

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& message)
      : std::runtime_error(std::string(err_name(code)) + ": " + message), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, Err code, const std::string& message) {
  if (!cond) raise(code, message);
}

}  // namespace dyad
