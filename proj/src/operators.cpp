#include "vlw/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vlw/error.hpp"

namespace vlw {

double DiscreteKernel::mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double bump_profile(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

namespace {

void normalise(DiscreteKernel& k) {
  const double s = k.mass();
  for (double& w : k.weights) w /= s;
}

// Visits every offset in [-reach, reach]^n, axis 0 fastest.
template <class Visit>
void for_offsets(int n, const std::array<int, 3>& reach, Visit&& visit) {
  std::array<int, 3> k{0, 0, 0};
  const int r2 = n > 2 ? reach[2] : 0;
  const int r1 = n > 1 ? reach[1] : 0;
  for (k[2] = -r2; k[2] <= r2; ++k[2]) {
    for (k[1] = -r1; k[1] <= r1; ++k[1]) {
      for (k[0] = -reach[0]; k[0] <= reach[0]; ++k[0]) visit(k);
    }
  }
}

}  // namespace

DiscreteKernel make_mollifier(const Grid& grid, double t) {
  const double h = grid.min_width();
  if (!(t >= h * (1.0 - 1e-12))) {
    std::ostringstream msg;
    msg << "mollifier scale t = " << t << " is below the cell width h = " << h;
    raise(ErrorKind::resolution_limit, msg.str());
  }
  const int n = grid.dim();
  DiscreteKernel k;
  k.dim = n;
  k.radius = t;
  std::array<int, 3> reach{0, 0, 0};
  for (int a = 0; a < n; ++a) reach[a] = static_cast<int>(std::ceil(t / grid.width(a)));
  for_offsets(n, reach, [&](const std::array<int, 3>& off) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const double x = off[a] * grid.width(a);
      r2 += x * x;
    }
    const double r = std::sqrt(r2) / t;
    if (r < 1.0) {
      k.offsets.push_back(off);
      k.weights.push_back(bump_profile(r));
    }
  });
  normalise(k);
  return k;
}

DiscreteKernel make_box_kernel(const Grid& grid, const Cube& q) {
  const int n = grid.dim();
  for (int a = 0; a < n; ++a) {
    if (std::abs(q.lower[a] + 0.5 * q.side) > 1e-12 * q.side) {
      raise(ErrorKind::precondition, "box kernel needs a cube centred at the origin");
    }
  }
  DiscreteKernel k;
  k.dim = n;
  k.radius = 0.5 * q.side * std::sqrt(static_cast<double>(n));
  std::array<int, 3> reach{0, 0, 0};
  for (int a = 0; a < n; ++a) reach[a] = static_cast<int>(std::ceil(q.side / grid.width(a))) + 1;
  for_offsets(n, reach, [&](const std::array<int, 3>& off) {
    for (int a = 0; a < n; ++a) {
      const double h = grid.width(a);
      const double x = off[a] * h;
      if (x < q.lower[a] - 1e-9 * h || x >= q.lower[a] + q.side - 1e-9 * h) return;
    }
    k.offsets.push_back(off);
    k.weights.push_back(1.0);
  });
  if (k.offsets.empty()) raise(ErrorKind::resolution_limit, "box kernel contains no cell offsets");
  normalise(k);
  return k;
}

namespace {

void convolve_into(const Grid& grid, int dim, const double* in, double* out,
                   const DiscreteKernel& k, Execution exec) {
  if (k.dim != grid.dim()) raise(ErrorKind::dimension_mismatch, "kernel and grid dimensions differ");
  const int m = grid.cells_per_axis();
  const int n = grid.dim();
  for_each_index(grid.cell_count(), exec, [&](std::size_t c) {
    const auto idx = grid.index(c);
    double* o = out + c * static_cast<std::size_t>(dim);
    for (int i = 0; i < dim; ++i) o[i] = 0.0;
    for (std::size_t j = 0; j < k.offsets.size(); ++j) {
      std::array<int, 3> src{0, 0, 0};
      bool inside = true;
      for (int a = 0; a < n; ++a) {
        src[a] = idx[a] - k.offsets[j][a];
        if (src[a] < 0 || src[a] >= m) {
          inside = false;
          break;
        }
      }
      if (!inside) continue;
      const double* v = in + grid.linear(src) * static_cast<std::size_t>(dim);
      for (int i = 0; i < dim; ++i) o[i] += k.weights[j] * v[i];
    }
  });
}

}  // namespace

ScalarField convolve(const ScalarField& f, const DiscreteKernel& k, Execution exec) {
  ScalarField out(f.grid);
  convolve_into(f.grid, 1, f.values.data(), out.values.data(), k, exec);
  return out;
}

VectorField convolve(const VectorField& f, const DiscreteKernel& k, Execution exec) {
  VectorField out(f.grid, f.dim);
  convolve_into(f.grid, f.dim, f.values.data(), out.values.data(), k, exec);
  return out;
}

namespace {

void add_average(const VectorField& f, const std::vector<std::size_t>& cells, VectorField& out) {
  std::vector<double> mean(static_cast<std::size_t>(f.dim), 0.0);
  for (auto c : cells) {
    const auto v = f.at(c);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
  }
  for (double& v : mean) v /= static_cast<double>(cells.size());
  for (auto c : cells) {
    auto o = out.at(c);
    for (std::size_t i = 0; i < mean.size(); ++i) o[i] += mean[i];
  }
}

}  // namespace

VectorField average_on_cube(const VectorField& f, const Cube& q) {
  const auto cells = cells_in(f.grid, q);
  if (cells.empty()) raise(ErrorKind::precondition, "average over a cube with no cells");
  VectorField out(f.grid, f.dim);
  add_average(f, cells, out);
  return out;
}

VectorField average_on_family(const VectorField& f, const CubeFamily& family) {
  if (has_overlap(family, f.grid.dim())) {
    raise(ErrorKind::precondition, "averaging family has overlapping cubes");
  }
  VectorField out(f.grid, f.dim);
  for (const auto& q : family.cubes) {
    const auto cells = cells_in(f.grid, q);
    if (!cells.empty()) add_average(f, cells, out);
  }
  return out;
}

AveragingCheck averaging_bound_check(const MatrixField& w, const ExponentFunction& p,
                                     const VectorField& f, const Cube& q, double ap_constant) {
  AveragingCheck r;
  r.lhs = matrix_weighted_norm(w, average_on_cube(f, q), p).value;
  r.norm_f = matrix_weighted_norm(w, f, p).value;
  r.rhs = 4.0 * ap_constant * r.norm_f;
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-9);
  return r;
}

AveragingCheck averaging_family_check(const MatrixField& w, const ExponentFunction& p,
                                      const VectorField& f, const CubeFamily& family) {
  AveragingCheck r;
  r.lhs = matrix_weighted_norm(w, average_on_family(f, family), p).value;
  r.norm_f = matrix_weighted_norm(w, f, p).value;
  return r;
}

TiledBound tiled_convolution_bound(const MatrixField& w, const ExponentFunction& p,
                                   const VectorField& f, const Cube& q, double ap_constant) {
  TiledBound r;
  r.tiling = translate_tiling(q, f.grid);
  const int n = f.grid.dim();
  r.covers.disjoint = false;
  for (const auto& c : r.tiling.cubes) r.covers.cubes.push_back(tripled(c, n));
  const DiscreteKernel k = make_box_kernel(f.grid, q);
  r.lhs = matrix_weighted_norm(w, convolve(f, k), p).value;
  r.norm_f = matrix_weighted_norm(w, f, p).value;
  r.ap_constant = ap_constant;
  const double denom = ap_constant * r.norm_f;
  r.ratio = denom > 0.0 ? r.lhs / denom : 0.0;
  return r;
}

DiscreteKernel LayerCakeMixture::mixture() const {
  DiscreteKernel out = source;
  std::fill(out.weights.begin(), out.weights.end(), 0.0);
  for (std::size_t k = 0; k < balls.size(); ++k) {
    const double h = a[k] / static_cast<double>(balls[k].size());
    for (auto i : balls[k]) out.weights[i] += h;
  }
  return out;
}

double LayerCakeMixture::sup_gap() const {
  const DiscreteKernel phi = mixture();
  double gap = 0.0;
  double top = 0.0;
  for (std::size_t i = 0; i < source.weights.size(); ++i) {
    gap = std::max(gap, source.weights[i] - phi.weights[i]);
    top = std::max(top, source.weights[i]);
  }
  return top > 0.0 ? gap / top : 0.0;
}

double LayerCakeMixture::total_weight() const {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

LayerCakeMixture layer_cake(const DiscreteKernel& kernel, int levels) {
  if (levels < 1) raise(ErrorKind::precondition, "layer cake needs at least one level");
  LayerCakeMixture mix;
  mix.source = kernel;
  const double top = *std::max_element(kernel.weights.begin(), kernel.weights.end());
  const double gap = top / levels;
  std::vector<int> height(kernel.weights.size());
  for (std::size_t i = 0; i < kernel.weights.size(); ++i) {
    height[i] = std::min(levels, static_cast<int>(std::floor(kernel.weights[i] / gap)));
    // floor can round up across an exact level; step back so Phi <= phi
    while (height[i] > 0 && height[i] * gap > kernel.weights[i]) --height[i];
  }
  for (int k = 1; k <= levels; ++k) {
    std::vector<std::size_t> ball;
    for (std::size_t i = 0; i < height.size(); ++i) {
      if (height[i] >= k) ball.push_back(i);
    }
    if (ball.empty()) continue;
    mix.a.push_back(gap * static_cast<double>(ball.size()));
    mix.balls.push_back(std::move(ball));
  }
  return mix;
}

MinkowskiCheck layer_cake_minkowski(const MatrixField& w, const ExponentFunction& p,
                                    const VectorField& f, const LayerCakeMixture& mix) {
  MinkowskiCheck r;
  r.lhs = matrix_weighted_norm(w, convolve(f, mix.mixture()), p).value;
  for (std::size_t k = 0; k < mix.balls.size(); ++k) {
    DiscreteKernel avg;
    avg.dim = mix.source.dim;
    for (auto i : mix.balls[k]) {
      avg.offsets.push_back(mix.source.offsets[i]);
      avg.weights.push_back(1.0 / static_cast<double>(mix.balls[k].size()));
    }
    r.rhs += mix.a[k] * matrix_weighted_norm(w, convolve(f, avg), p).value;
  }
  return r;
}

std::vector<double> geometric_schedule(double t0, double t_min, double ratio) {
  if (!(t0 > 0.0) || !(ratio > 0.0 && ratio < 1.0)) {
    raise(ErrorKind::invalid_input, "schedule needs t0 > 0 and a ratio in (0, 1)");
  }
  std::vector<double> ts;
  for (double t = t0; t >= t_min * (1.0 - 1e-12); t *= ratio) ts.push_back(t);
  return ts;
}

IdentityStudy approximate_identity_study(const MatrixField& w, const ExponentFunction& p,
                                         const VectorField& f, const std::vector<double>& schedule,
                                         double ap_constant, Execution exec) {
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (!(schedule[i] < schedule[i - 1])) raise(ErrorKind::invalid_input, "t-schedule must decrease");
  }
  IdentityStudy s;
  s.norm_f = matrix_weighted_norm(w, f, p).value;
  s.ap_constant = ap_constant;
  s.rows.resize(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const VectorField g = convolve(f, make_mollifier(f.grid, schedule[i]), exec);
    VectorField diff = g;
    for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= f.values[k];
    StudyRow& row = s.rows[i];
    row.t = schedule[i];
    row.error = matrix_weighted_norm(w, diff, p).value;
    row.norm = matrix_weighted_norm(w, g, p).value;
    const double denom = ap_constant * s.norm_f;
    row.ratio = denom > 0.0 ? row.norm / denom : 0.0;
    s.c_emp = std::max(s.c_emp, row.ratio);
  }
  s.strictly_decreasing = true;
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    if (!(s.rows[i].error < s.rows[i - 1].error)) s.strictly_decreasing = false;
  }
  return s;
}

}  // namespace vlw
