#include "vlw/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Core>

#include "vlw/error.hpp"

namespace vlw {

std::string format_number(double v) {
  if (!std::isfinite(v)) return "divergent";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CsvTable::note(const std::string& key, const std::string& value) {
  manifest_.emplace_back(key, value);
}

void CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) {
    raise(ErrorKind::invalid_input, "csv row width differs from the header");
  }
  rows_.push_back(cells);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  for (const auto& [k, v] : manifest_) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(ErrorKind::config, "cannot open " + path.string() + " for writing");
  f << str();
}

CsvTable ap_table(const ApReport& report, int n) {
  std::vector<std::string> cols{"cube"};
  for (int a = 0; a < n; ++a) cols.push_back("corner_" + std::to_string(a));
  cols.push_back("side");
  cols.push_back("value");
  CsvTable t(cols);
  t.note("method", report.method == ApMethod::direct ? "direct" : "reducing");
  t.note("cubes", std::to_string(report.values.size()));
  t.note("supremum", report.supremum);
  for (std::size_t i = 0; i < report.values.size(); ++i) {
    const Cube& q = report.family.cubes[i];
    std::vector<std::string> r{std::to_string(i)};
    for (int a = 0; a < n; ++a) r.push_back(format_number(q.lower[a]));
    r.push_back(format_number(q.side));
    r.push_back(format_number(report.values[i]));
    t.row(r);
  }
  return t;
}

std::vector<std::pair<std::string, std::string>> build_info() {
  std::vector<std::pair<std::string, std::string>> info;
  info.emplace_back("vlw", kVersion);
  info.emplace_back("eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION));
#if defined(__clang__)
  info.emplace_back("compiler", std::string("clang ") + __clang_version__);
#elif defined(__GNUC__)
  info.emplace_back("compiler", std::string("gcc ") + __VERSION__);
#endif
  info.emplace_back("cxx_standard", std::to_string(__cplusplus));
  return info;
}

}  // namespace vlw
