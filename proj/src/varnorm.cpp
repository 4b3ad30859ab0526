#include "vlw/varnorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vlw/error.hpp"

namespace vlw {

namespace {

// Cells with a > 0 split into finite-exponent terms (kept as log a and p so
// each evaluation costs one exp) and the esssup over infinite-exponent cells.
struct ModularTerms {
  std::vector<double> log_a;
  std::vector<double> p;
  double sup_inf = 0.0;
  double a_max = 0.0;
  double vol = 0.0;

  double operator()(double lambda) const {
    const double log_l = std::log(lambda);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sum += std::exp(p[i] * (log_a[i] - log_l));
    return sum * vol + sup_inf / lambda;
  }
};

ModularTerms collect(std::span<const double> a, std::span<const double> p, double vol) {
  if (a.size() != p.size()) raise(ErrorKind::dimension_mismatch, "magnitudes and exponents differ in size");
  ModularTerms t;
  t.vol = vol;
  t.log_a.reserve(a.size());
  t.p.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = std::abs(a[i]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite field value at entry " << i;
      raise(ErrorKind::invalid_input, msg.str());
    }
    if (v == 0.0) continue;
    t.a_max = std::max(t.a_max, v);
    if (std::isinf(p[i])) {
      t.sup_inf = std::max(t.sup_inf, v);
    } else {
      t.log_a.push_back(std::log(v));
      t.p.push_back(p[i]);
    }
  }
  return t;
}

std::vector<double> gather(std::span<const double> values, std::span<const std::size_t> cells) {
  std::vector<double> out(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) out[k] = values[cells[k]];
  return out;
}

void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) raise(ErrorKind::dimension_mismatch, "fields live on different grids");
}

}  // namespace

double modular(std::span<const double> a, std::span<const double> p, double cell_volume) {
  return collect(a, p, cell_volume)(1.0);
}

NormResult luxemburg_norm(std::span<const double> a, std::span<const double> p,
                          double cell_volume, const NormOptions& opts) {
  const ModularTerms rho = collect(a, p, cell_volume);
  NormResult res;
  if (rho.a_max == 0.0) return res;

  const double total_volume = cell_volume * static_cast<double>(a.size());
  double hi = std::max(1.0, rho.a_max * (1.0 + total_volume));
  int guard = 0;
  while (rho(hi) > 1.0 && guard++ < 2000) hi *= 2.0;
  double lo = 0.5 * hi;
  guard = 0;
  while (rho(lo) <= 1.0 && guard++ < 2000) {
    hi = lo;
    lo *= 0.5;
  }

  int it = 0;
  while (hi - lo > opts.rel_tol * hi && it < opts.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
    if (rho(mid) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++it;
  }
  res.value = 0.5 * (lo + hi);
  res.iterations = it;
  res.bracket_width = hi - lo;
  res.capped = (hi - lo > opts.rel_tol * hi) && it >= opts.max_iterations;
  return res;
}

double modular(const ScalarField& f, const ExponentFunction& p) {
  check_same_grid(f.grid, p.grid());
  return modular(f.values, p.values(), f.grid.cell_volume());
}

NormResult luxemburg_norm(const ScalarField& f, const ExponentFunction& p,
                          const NormOptions& opts) {
  check_same_grid(f.grid, p.grid());
  return luxemburg_norm(f.values, p.values(), f.grid.cell_volume(), opts);
}

NormResult luxemburg_norm_on(std::span<const double> a, const ExponentFunction& p,
                             std::span<const std::size_t> cells, const NormOptions& opts) {
  const auto av = gather(a, cells);
  const auto pv = gather(p.values(), cells);
  return luxemburg_norm(av, pv, p.grid().cell_volume(), opts);
}

NormResult luxemburg_norm(const ScalarField& f, const ExponentFunction& p, const Cube& q,
                          const NormOptions& opts) {
  check_same_grid(f.grid, p.grid());
  const auto cells = cells_in(f.grid, q);
  return luxemburg_norm_on(f.values, p, cells, opts);
}

ScalarField magnitude(const VectorField& f) {
  ScalarField out(f.grid);
  for (std::size_t c = 0; c < f.grid.cell_count(); ++c) {
    double s = 0.0;
    for (double v : f.at(c)) s += v * v;
    out.values[c] = std::sqrt(s);
  }
  return out;
}

ScalarField weighted_magnitude(const MatrixField& w, const VectorField& f) {
  check_same_grid(w.grid, f.grid);
  if (w.dim != f.dim) raise(ErrorKind::dimension_mismatch, "weight and field dimensions differ");
  ScalarField out(f.grid);
  for (std::size_t c = 0; c < f.grid.cell_count(); ++c) {
    Eigen::Map<const Eigen::VectorXd> v(f.at(c).data(), f.dim);
    out.values[c] = (w.at(c) * v).norm();
  }
  return out;
}

NormResult vector_norm(const VectorField& f, const ExponentFunction& p, const NormOptions& opts) {
  return luxemburg_norm(magnitude(f), p, opts);
}

NormResult matrix_weighted_norm(const MatrixField& w, const VectorField& f,
                                const ExponentFunction& p, const NormOptions& opts) {
  return luxemburg_norm(weighted_magnitude(w, f), p, opts);
}

NormResult scalar_weighted_norm(const ScalarField& f, const ScalarField& w,
                                const ExponentFunction& p, const NormOptions& opts) {
  check_same_grid(f.grid, w.grid);
  ScalarField fw(f.grid);
  for (std::size_t c = 0; c < f.size(); ++c) fw.values[c] = std::abs(f.values[c]) * w.values[c];
  return luxemburg_norm(fw, p, opts);
}

HolderPairing holder_pairing(const ScalarField& f, const ScalarField& g,
                             const ExponentFunction& p, double constant) {
  check_same_grid(f.grid, g.grid);
  HolderPairing out;
  double s = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) s += std::abs(f.values[c] * g.values[c]);
  out.lhs = s * f.grid.cell_volume();
  out.norm_f = luxemburg_norm(f, p).value;
  out.norm_g = luxemburg_norm(g, conjugate(p)).value;
  out.rhs = constant * out.norm_f * out.norm_g;
  return out;
}

DualWitness dual_witness(const VectorField& f, const ExponentFunction& p) {
  check_same_grid(f.grid, p.grid());
  const Grid& grid = f.grid;
  const double vol = grid.cell_volume();
  DualWitness out;
  out.g = VectorField(grid, f.dim);
  out.norm_f = vector_norm(f, p).value;
  if (out.norm_f == 0.0) {
    out.zero_input = true;
    out.contract_holds = true;
    return out;
  }

  for (int i = 0; i < f.dim; ++i) {
    const ScalarField fi = f.component(i);
    const double lambda = luxemburg_norm(fi, p).value;
    if (lambda == 0.0) continue;
    // shares of the modular of f_i / lambda: p = 1 cells, and the esssup term
    double share_one = 0.0;
    double share_inf = 0.0;
    std::size_t argmax_inf = grid.cell_count();
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const double a = std::abs(fi.values[c]) / lambda;
      if (p.is_infinite(c)) {
        if (argmax_inf == grid.cell_count() || a > share_inf) {
          share_inf = a;
          argmax_inf = c;
        }
      } else if (p[c] == 1.0) {
        share_one += a * vol;
      }
    }
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const double v = fi.values[c];
      const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      double gi = 0.0;
      if (p.is_infinite(c)) {
        if (c == argmax_inf) gi = sign * share_inf / vol;
      } else if (p[c] == 1.0) {
        // p' = inf here; height share_one keeps the esssup term of the
        // conjugate modular equal to the share this region takes
        gi = sign * share_one;
      } else {
        gi = sign * std::pow(std::abs(v) / lambda, p[c] - 1.0);
      }
      out.g.at(c)[static_cast<std::size_t>(i)] = gi;
    }
  }

  ScalarField l1(grid);
  double pairing = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    double s = 0.0;
    for (int i = 0; i < f.dim; ++i) {
      s += std::abs(f.at(c)[static_cast<std::size_t>(i)]);
      pairing += f.at(c)[static_cast<std::size_t>(i)] * out.g.at(c)[static_cast<std::size_t>(i)];
    }
    l1.values[c] = s;
  }
  out.pairing = pairing * vol;
  out.norm_f_l1 = luxemburg_norm(l1, p).value;
  out.norm_g = vector_norm(out.g, conjugate(p)).value;
  const double slack = 1e-9;
  out.contract_holds = out.norm_g <= f.dim * (1.0 + slack) &&
                       out.norm_f_l1 <= 4.0 * out.pairing * (1.0 + slack);
  return out;
}

double property_g_ratio(const ScalarField& f, const ScalarField& g, const ExponentFunction& p,
                        const CubeFamily& family) {
  check_same_grid(f.grid, g.grid);
  const int n = f.grid.dim();
  if (has_overlap(family, n)) raise(ErrorKind::precondition, "property G needs a disjoint family");
  const ExponentFunction q = conjugate(p);
  const double denom = luxemburg_norm(f, p).value * luxemburg_norm(g, q).value;
  if (denom == 0.0) raise(ErrorKind::precondition, "property G ratio with a zero denominator");
  double sum = 0.0;
  for (const auto& cube : family.cubes) {
    const auto cells = cells_in(f.grid, cube);
    if (cells.empty()) continue;
    sum += luxemburg_norm_on(f.values, p, cells).value * luxemburg_norm_on(g.values, q, cells).value;
  }
  return sum / denom;
}

}  // namespace vlw
