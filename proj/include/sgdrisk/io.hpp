#pragma once

#include <string>

#include "sgdrisk/numerics.hpp"

namespace sgdrisk {

/// 17-significant-digit decimal; round-trips doubles exactly. All numeric
/// file output goes through this.
std::string g17(double x);

std::string iso8601_now();

/// Minimal ordered JSON object builder with g17 numbers (the vendored
/// parser does not control float formatting on output).
class JsonBuilder {
 public:
  JsonBuilder& num(const std::string& key, double v);
  JsonBuilder& integer(const std::string& key, long long v);
  JsonBuilder& uinteger(const std::string& key, unsigned long long v);
  JsonBuilder& boolean(const std::string& key, bool v);
  JsonBuilder& str(const std::string& key, const std::string& v);
  /// Pre-serialized JSON value (object, array, ...).
  JsonBuilder& raw(const std::string& key, const std::string& v);
  JsonBuilder& num_array(const std::string& key, const Vec& v);

  std::string build() const { return "{" + body_ + "}"; }

 private:
  void key(const std::string& k);
  std::string body_;
};

std::string json_escape(const std::string& s);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace sgdrisk
