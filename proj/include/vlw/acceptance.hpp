#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vlw/parallel.hpp"
#include "vlw/report.hpp"

namespace vlw {

struct CriterionResult {
  int id = 0;
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> extras;  // recorded in the manifest
};

struct SuiteOptions {
  std::uint64_t seed = 0x5eed2024;
  double holder_constant = 4.0;  // exposed for the mutation smoke test
  int threads_hi = 4;            // thread count compared against 1 in the determinism check
};

inline constexpr int kCriterionCount = 13;

CriterionResult run_criterion(int id, const SuiteOptions& opts);
/// Runs the criteria in `ids` (all when empty); errors become failed results.
std::vector<CriterionResult> run_suite(const SuiteOptions& opts,
                                       const std::function<void(const CriterionResult&)>& on_result = {},
                                       const std::vector<int>& ids = {});

/// One line per criterion: verdict, id, name, measured, bound.
std::string format_result(const CriterionResult& r);
CsvTable suite_table(const std::vector<CriterionResult>& results, const SuiteOptions& opts);

}  // namespace vlw
