// Runs every acceptance criterion and prints one verdict line each.
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "vlw/acceptance.hpp"

int main(int argc, char** argv) {
  vlw::SuiteOptions opts;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--seed") == 0) opts.seed = std::strtoull(argv[i + 1], nullptr, 10);
  }
  int failed = 0;
  vlw::run_suite(opts, [&](const vlw::CriterionResult& r) {
    std::printf("%s\n", vlw::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  });
  std::printf("%d of %d criteria passed\n", vlw::kCriterionCount - failed, vlw::kCriterionCount);
  return failed == 0 ? 0 : 1;
}
