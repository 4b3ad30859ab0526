#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "vlw/grid.hpp"

namespace vlw {

inline constexpr double kInfiniteExponent = std::numeric_limits<double>::infinity();

struct LogHolderEstimate {
  double c0 = 0.0;
  double c_inf = 0.0;
  double p_inf = 0.0;
  std::size_t pairs = 0;      // pairs evaluated for c0
  bool sampled = false;       // true when the pair scan was subsampled
  bool jump_suspected = false;  // adjacent differences fail to shrink under refinement
};

/// Piecewise-constant exponent p(.) with values in [1, inf]; inf is stored as
/// +infinity and the cells holding it form the region Omega_inf.
class ExponentFunction {
 public:
  ExponentFunction() = default;
  ExponentFunction(const Grid& grid, std::vector<double> values);

  static ExponentFunction constant(const Grid& grid, double p);
  static ExponentFunction from_function(const Grid& grid,
                                        const std::function<double(const Point&)>& f);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t cell) const { return values_[cell]; }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  bool is_infinite(std::size_t cell) const { return std::isinf(values_[cell]); }
  bool has_infinite_region() const { return std::isinf(p_plus_); }
  bool is_constant() const { return p_minus_ == p_plus_; }

  const std::optional<LogHolderEstimate>& log_holder() const { return log_holder_; }
  void set_log_holder(const LogHolderEstimate& lh) { log_holder_ = lh; }

 private:
  Grid grid_;
  std::vector<double> values_;
  double p_minus_ = 1.0;
  double p_plus_ = 1.0;
  std::optional<LogHolderEstimate> log_holder_;
};

/// Pointwise conjugate exponent with 1/inf = 0.
double conjugate_value(double p);
ExponentFunction conjugate(const ExponentFunction& p);

/// p_Q with 1/p_Q the cell average of 1/p over the cube.
double harmonic_mean(const ExponentFunction& p, const Cube& q);
double harmonic_mean(const ExponentFunction& p, std::span<const std::size_t> cells);

/// Empirical log-Hoelder constants over cell centres. Pair scans above
/// `max_pairs` are replaced by that many seeded random pairs.
LogHolderEstimate log_holder_constants(const ExponentFunction& p,
                                       std::uint64_t seed = 0x5eed,
                                       std::size_t max_pairs = 1'000'000);

}  // namespace vlw
