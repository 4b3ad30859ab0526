#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vlw/grid.hpp"
#include "vlw/muckenhoupt.hpp"

namespace vlw {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal for finite values, "divergent" otherwise.
std::string format_number(double v);

/// Table with a leading block of "# key: value" lines.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void note(const std::string& key, const std::string& value);
  void note(const std::string& key, double value) { note(key, format_number(value)); }
  void row(const std::vector<std::string>& cells);

  std::string str() const;
  void write(const std::filesystem::path& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::pair<std::string, std::string>> manifest_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Per-cube constants: cube id, corner per axis, side, value.
CsvTable ap_table(const ApReport& report, int n);

/// Library and toolchain versions as manifest entries.
std::vector<std::pair<std::string, std::string>> build_info();

}  // namespace vlw
