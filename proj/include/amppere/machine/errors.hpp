#pragma once

#include <stdexcept>
#include <string>

namespace amppere {

/// Base class for every error raised by the abstract machine and the layers
/// built on it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class ContextMismatch : public Error {
 public:
  using Error::Error;
};

class CapabilityUnsupported : public Error {
 public:
  using Error::Error;
};

class AuthorityError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

/// Raised when private content influences host control flow or a public
/// output without going through dec(), or when twin traces diverge.
class TaintViolation : public Error {
 public:
  TaintViolation(std::string operation, std::string site)
      : Error("taint violation in " + operation + " at " + site),
        operation_(std::move(operation)),
        site_(std::move(site)) {}

  const std::string& operation() const { return operation_; }
  const std::string& site() const { return site_; }

 private:
  std::string operation_;
  std::string site_;
};

/// Pipeline failure tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace amppere
