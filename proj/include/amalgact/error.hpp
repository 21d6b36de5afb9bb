#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace amalgact {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combining elements of different groups, invalid tables, bad homomorphisms.
class GroupError : public Error {
 public:
  using Error::Error;
};

/// A bounded search (translates, fresh points, coset enumeration) ran out.
class SearchExhausted : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of a construction does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Configuration parse failure. `key()` names the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace amalgact
