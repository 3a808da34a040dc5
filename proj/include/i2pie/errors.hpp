#pragma once

#include <stdexcept>
#include <string>

namespace i2pie {

// Coarse classification used by the CLI to pick an exit code.
enum class ErrorKind {
  InvalidArgument,
  DomainMismatch,
  DegenerateInput,
  NoAdmissibleBound,
  AliasingRisk,
  ShapeMismatch,
  Validation,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define I2PIE_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

I2PIE_DEFINE_ERROR(InvalidArgument, InvalidArgument)
I2PIE_DEFINE_ERROR(DomainMismatch, DomainMismatch)
I2PIE_DEFINE_ERROR(DegenerateInput, DegenerateInput)
I2PIE_DEFINE_ERROR(NoAdmissibleBound, NoAdmissibleBound)
I2PIE_DEFINE_ERROR(AliasingRisk, AliasingRisk)
I2PIE_DEFINE_ERROR(ShapeMismatch, ShapeMismatch)
I2PIE_DEFINE_ERROR(ValidationError, Validation)
I2PIE_DEFINE_ERROR(IoError, Io)

#undef I2PIE_DEFINE_ERROR

}  // namespace i2pie
