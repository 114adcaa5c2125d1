#pragma once

#include <stdexcept>
#include <string>

namespace tunnelsplit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The numerics broke down (vacuum stall, grid too small, degenerate flux, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. `key()` names the offending JSON path.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace tunnelsplit
