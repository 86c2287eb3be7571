#include "sgdrisk/io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace sgdrisk {

std::string g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string iso8601_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void JsonBuilder::key(const std::string& k) {
  if (!body_.empty()) body_ += ",";
  body_ += "\"" + json_escape(k) + "\":";
}

JsonBuilder& JsonBuilder::num(const std::string& k, double v) {
  key(k);
  body_ += g17(v);
  return *this;
}

JsonBuilder& JsonBuilder::integer(const std::string& k, long long v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

JsonBuilder& JsonBuilder::uinteger(const std::string& k, unsigned long long v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

JsonBuilder& JsonBuilder::boolean(const std::string& k, bool v) {
  key(k);
  body_ += v ? "true" : "false";
  return *this;
}

JsonBuilder& JsonBuilder::str(const std::string& k, const std::string& v) {
  key(k);
  body_ += "\"" + json_escape(v) + "\"";
  return *this;
}

JsonBuilder& JsonBuilder::raw(const std::string& k, const std::string& v) {
  key(k);
  body_ += v;
  return *this;
}

JsonBuilder& JsonBuilder::num_array(const std::string& k, const Vec& v) {
  key(k);
  body_ += "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) body_ += ",";
    body_ += g17(v[i]);
  }
  body_ += "]";
  return *this;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sgdrisk
