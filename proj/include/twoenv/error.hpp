#pragma once

#include <stdexcept>
#include <string>

namespace twoenv {

/// A precondition on model inputs was violated (bad grid, bad weights,
/// impossible measured value, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// A requested table would exceed the configured materialization cap.
class ResourceError : public std::length_error {
 public:
  explicit ResourceError(const std::string& what) : std::length_error(what) {}
};

/// Malformed command line or configuration file.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twoenv
