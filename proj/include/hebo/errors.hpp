#pragma once

#include <stdexcept>
#include <string>

namespace hebo {

/// Malformed input document (JSON schema violation, bad CSV row, ...).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid input that violates a domain invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Model fitting failed (degenerate data, ill-conditioned linear algebra).
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hebo
