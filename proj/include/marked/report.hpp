#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "marked/errors.hpp"
#include "marked/rational.hpp"

namespace marked {

/// Locale-independent double formatting; every report number goes through
/// here so reruns are byte-identical.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
    append_row(header);
  }

  void append_row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw InvariantViolated("csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }

  const std::string& str() const { return body_; }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << body_;
  }

 private:
  size_t cols_;
  std::string body_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace marked
