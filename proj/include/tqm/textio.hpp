#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace tqm {

// Locale-independent float formatting: %g-style with 17 significant digits
// via std::to_chars, so reruns produce byte-identical text.
std::string fmt_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);

  static std::string cell(double v) { return fmt_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& s) { return s; }

 private:
  std::ofstream out_;
  size_t n_cols_;
};

}  // namespace tqm
