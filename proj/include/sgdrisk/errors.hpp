#pragma once

#include <stdexcept>
#include <string>

namespace sgdrisk {

/// Step size violates eta <= 1 / (lambda_max + alpha * tr(H)); bound
/// evaluations refuse such specs.
class stability_error : public std::domain_error {
 public:
  explicit stability_error(const std::string& what) : std::domain_error(what) {}
};

/// Problem has no usable scale (e.g. all-zero spectrum where a stable
/// step size is undefined).
class degenerate_error : public std::domain_error {
 public:
  explicit degenerate_error(const std::string& what) : std::domain_error(what) {}
};

/// Raised by config loading; carries the offending field path.
class config_error : public std::runtime_error {
 public:
  config_error(std::string field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace sgdrisk
