#include "vlw/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "vlw/error.hpp"

namespace vlw {

ExponentFunction::ExponentFunction(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    raise(ErrorKind::dimension_mismatch, "exponent size does not match the grid");
  }
  p_minus_ = kInfiniteExponent;
  p_plus_ = 1.0;
  for (std::size_t c = 0; c < values_.size(); ++c) {
    const double p = values_[c];
    if (std::isnan(p) || p < 1.0) {
      std::ostringstream msg;
      msg << "exponent value " << p << " at cell " << c << " is outside [1, inf]";
      raise(ErrorKind::invalid_input, msg.str());
    }
    p_minus_ = std::min(p_minus_, p);
    p_plus_ = std::max(p_plus_, p);
  }
}

ExponentFunction ExponentFunction::constant(const Grid& grid, double p) {
  return ExponentFunction(grid, std::vector<double>(grid.cell_count(), p));
}

ExponentFunction ExponentFunction::from_function(const Grid& grid,
                                                 const std::function<double(const Point&)>& f) {
  std::vector<double> v(grid.cell_count());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = f(grid.center(c));
  return ExponentFunction(grid, std::move(v));
}

double conjugate_value(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return kInfiniteExponent;
  return p / (p - 1.0);
}

ExponentFunction conjugate(const ExponentFunction& p) {
  std::vector<double> v(p.values().begin(), p.values().end());
  for (double& x : v) x = conjugate_value(x);
  return ExponentFunction(p.grid(), std::move(v));
}

double harmonic_mean(const ExponentFunction& p, std::span<const std::size_t> cells) {
  if (cells.empty()) raise(ErrorKind::precondition, "harmonic mean over an empty cube");
  double sum = 0.0;
  for (auto c : cells) sum += 1.0 / p[c];  // 1/inf == 0
  const double inv = sum / static_cast<double>(cells.size());
  return inv > 0.0 ? 1.0 / inv : kInfiniteExponent;
}

double harmonic_mean(const ExponentFunction& p, const Cube& q) {
  const auto cells = cells_in(p.grid(), q);
  return harmonic_mean(p, cells);
}

namespace {

double distance(const Point& x, const Point& y, int n) {
  double s = 0.0;
  for (int a = 0; a < n; ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
  return std::sqrt(s);
}

double pair_term(const ExponentFunction& p, const std::vector<Point>& centers, int n,
                 std::size_t i, std::size_t j) {
  const double r = distance(centers[i], centers[j], n);
  if (r <= 0.0 || r >= 0.5) return 0.0;
  const double diff = std::abs(p[i] - p[j]);
  if (std::isnan(diff)) return 0.0;  // inf - inf: both on Omega_inf
  return diff * -std::log(r);
}

// Adjacent-cell differences along each axis compared with differences two
// cells apart. For a continuous exponent the ratio tends to 1/2; a jump keeps
// it near 1.
bool jump_indicator(const ExponentFunction& p) {
  const Grid& g = p.grid();
  if (g.cells_per_axis() < 3) return false;
  double d1 = 0.0;
  double d2 = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    auto idx = g.index(c);
    for (int a = 0; a < g.dim(); ++a) {
      if (idx[a] + 2 >= g.cells_per_axis()) continue;
      auto i1 = idx;
      auto i2 = idx;
      i1[a] += 1;
      i2[a] += 2;
      const double a1 = std::abs(p[g.linear(i1)] - p[c]);
      const double a2 = std::abs(p[g.linear(i2)] - p[c]);
      if (std::isfinite(a1)) d1 = std::max(d1, a1);
      if (std::isfinite(a2)) d2 = std::max(d2, a2);
    }
  }
  return d1 > 1e-12 && d1 > 0.75 * d2;
}

}  // namespace

LogHolderEstimate log_holder_constants(const ExponentFunction& p, std::uint64_t seed,
                                       std::size_t max_pairs) {
  const Grid& g = p.grid();
  const std::size_t count = g.cell_count();
  if (count < 2) raise(ErrorKind::precondition, "log-Hoelder estimate needs at least 2 cells");
  const int n = g.dim();
  std::vector<Point> centers(count);
  for (std::size_t c = 0; c < count; ++c) centers[c] = g.center(c);

  LogHolderEstimate est;
  const std::size_t all_pairs = count * (count - 1) / 2;
  if (all_pairs <= max_pairs) {
    double c0 = 0.0;
#pragma omp parallel for reduction(max : c0) schedule(static)
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = i + 1; j < count; ++j) {
        c0 = std::max(c0, pair_term(p, centers, n, i, j));
      }
    }
    est.c0 = c0;
    est.pairs = all_pairs;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, count - 1);
    double c0 = 0.0;
    for (std::size_t k = 0; k < max_pairs; ++k) {
      const std::size_t i = pick(rng);
      const std::size_t j = pick(rng);
      if (i != j) c0 = std::max(c0, pair_term(p, centers, n, i, j));
    }
    // adjacent pairs carry the small-distance behaviour; always include them
    for (std::size_t c = 0; c < count; ++c) {
      auto idx = g.index(c);
      for (int a = 0; a < n; ++a) {
        if (idx[a] + 1 >= g.cells_per_axis()) continue;
        auto nb = idx;
        nb[a] += 1;
        c0 = std::max(c0, pair_term(p, centers, n, c, g.linear(nb)));
      }
    }
    est.c0 = c0;
    est.pairs = max_pairs;
    est.sampled = true;
  }

  if (p.has_infinite_region()) {
    if (p.p_minus() < kInfiniteExponent) est.c0 = kInfiniteExponent;
    est.p_inf = kInfiniteExponent;
    est.c_inf = p.is_constant() ? 0.0 : kInfiniteExponent;
    est.jump_suspected = !p.is_constant();
    return est;
  }

  std::vector<double> w(count);
  for (std::size_t c = 0; c < count; ++c) {
    w[c] = std::log(std::exp(1.0) + distance(centers[c], Point{0.0, 0.0, 0.0}, n));
  }
  // minimise max_i w_i |p_i - c| over c: the balance point of the two
  // one-sided maxima, found by bisection
  double lo = p.p_minus();
  double hi = p.p_plus();
  auto above = [&](double c) {
    double m = 0.0;
    for (std::size_t i = 0; i < count; ++i) m = std::max(m, w[i] * (p[i] - c));
    return m;
  };
  auto below = [&](double c) {
    double m = 0.0;
    for (std::size_t i = 0; i < count; ++i) m = std::max(m, w[i] * (c - p[i]));
    return m;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (above(mid) > below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  est.p_inf = 0.5 * (lo + hi);
  est.c_inf = std::max(above(est.p_inf), below(est.p_inf));
  est.jump_suspected = jump_indicator(p);
  return est;
}

}  // namespace vlw
