#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace symsearch {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a file format or a domain invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A structured-text or binary file failed to parse. `where` is a line
/// number or byte offset, depending on the format.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::uint64_t where, const std::string& what)
      : DataError(source + ":" + std::to_string(where) + ": " + what), source_(source), where_(where) {}

  const std::string& source() const noexcept { return source_; }
  std::uint64_t where() const noexcept { return where_; }

 private:
  std::string source_;
  std::uint64_t where_;
};

/// Completion-service failures. Subclasses decide whether a retry may help.
class ServiceError : public Error {
 public:
  using Error::Error;
  virtual bool retryable() const noexcept { return false; }
};

class TransportError : public ServiceError {
 public:
  using ServiceError::ServiceError;
  bool retryable() const noexcept override { return true; }
};

class RateLimitError : public ServiceError {
 public:
  using ServiceError::ServiceError;
  bool retryable() const noexcept override { return true; }
};

class AuthError : public ServiceError {
 public:
  using ServiceError::ServiceError;
};

class MalformedResponseError : public ServiceError {
 public:
  using ServiceError::ServiceError;
};

class RetriesExhaustedError : public ServiceError {
 public:
  RetriesExhaustedError(const std::string& what, int attempts)
      : ServiceError(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

}  // namespace symsearch
