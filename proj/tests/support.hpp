#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "vlw/grid.hpp"

namespace testing {

// Seeded generator for property tests: uniform from the top 53 bits so the
// streams do not depend on the standard library's distributions.
struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
};

inline vlw::Grid line(int m, double lo = 0.0, double hi = 1.0) {
  const double a[1] = {lo};
  const double b[1] = {hi};
  return vlw::make_uniform_grid(1, a, b, m);
}

inline vlw::Grid square(int m, double lo = 0.0, double hi = 1.0) {
  const double a[2] = {lo, lo};
  const double b[2] = {hi, hi};
  return vlw::make_uniform_grid(2, a, b, m);
}

inline vlw::ScalarField random_field(const vlw::Grid& g, Rng& r, double spread = 1.0) {
  vlw::ScalarField f(g);
  for (double& v : f.values) v = r.uniform(-1.0, 1.0) * std::exp(r.uniform(-spread, spread));
  return f;
}

inline vlw::ScalarField random_positive(const vlw::Grid& g, Rng& r, double spread = 1.0) {
  vlw::ScalarField f(g);
  for (double& v : f.values) v = std::exp(r.uniform(-spread, spread));
  return f;
}

inline vlw::VectorField random_vector(const vlw::Grid& g, int d, Rng& r) {
  vlw::VectorField f(g, d);
  for (double& v : f.values) v = r.uniform(-1.0, 1.0);
  return f;
}

}  // namespace testing
