#include "vlw/muckenhoupt.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Core>

#include "vlw/error.hpp"

namespace vlw {

namespace {

void check_grids(const Grid& a, const Grid& b) {
  if (!(a == b)) raise(ErrorKind::dimension_mismatch, "weight and exponent grids differ");
}

std::vector<std::vector<std::size_t>> cube_cells(const Grid& grid, const CubeFamily& family) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(family.cubes.size());
  for (std::size_t i = 0; i < family.cubes.size(); ++i) {
    out.push_back(cells_in(grid, family.cubes[i]));
    if (out.back().empty()) {
      std::ostringstream msg;
      msg << "cube " << i << " of the family contains no cells";
      raise(ErrorKind::precondition, msg.str());
    }
  }
  return out;
}

void finish(ApReport& r) {
  r.supremum = 0.0;
  for (double v : r.values) r.supremum = std::max(r.supremum, v);
}

// |A B|_op for column-major d x d blocks.
double product_norm(const double* a, const double* b, int d) {
  if (d == 1) return std::abs(a[0] * b[0]);
  if (d == 2) {
    const double c00 = a[0] * b[0] + a[2] * b[1];
    const double c10 = a[1] * b[0] + a[3] * b[1];
    const double c01 = a[0] * b[2] + a[2] * b[3];
    const double c11 = a[1] * b[2] + a[3] * b[3];
    const double t = c00 * c00 + c10 * c10 + c01 * c01 + c11 * c11;
    const double det = c00 * c11 - c01 * c10;
    const double disc = std::max(0.0, t * t - 4.0 * det * det);
    return std::sqrt(0.5 * (t + std::sqrt(disc)));
  }
  Eigen::Map<const Eigen::MatrixXd> ma(a, d, d);
  Eigen::Map<const Eigen::MatrixXd> mb(b, d, d);
  return operator_norm(ma * mb);
}

std::vector<double> gather(std::span<const double> v, const std::vector<std::size_t>& cells) {
  std::vector<double> out(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) out[k] = v[cells[k]];
  return out;
}

}  // namespace

NormOptions kernel_norm_options() {
  NormOptions o;
  o.rel_tol = 1e-13;
  o.max_iterations = 200;
  return o;
}

ApReport scalar_ap_constant(const ScalarField& w, const ExponentFunction& p,
                            const CubeFamily& family, Execution exec) {
  check_grids(w.grid, p.grid());
  std::vector<double> inv(w.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    if (!(w.values[c] > 0.0) || !std::isfinite(w.values[c])) {
      std::ostringstream msg;
      msg << "scalar weight is not positive and finite at cell " << c;
      raise(ErrorKind::invalid_input, msg.str());
    }
    inv[c] = 1.0 / w.values[c];
  }
  const ExponentFunction q = conjugate(p);
  const auto cells = cube_cells(w.grid, family);
  const NormOptions opts = kernel_norm_options();
  const double vol = w.grid.cell_volume();

  ApReport r;
  r.family = family;
  r.method = ApMethod::direct;
  r.values.assign(family.cubes.size(), 0.0);
  for_each_index(family.cubes.size(), exec, [&](std::size_t i) {
    const double a = luxemburg_norm_on(w.values, p, cells[i], opts).value;
    const double b = luxemburg_norm_on(inv, q, cells[i], opts).value;
    const double measure = vol * static_cast<double>(cells[i].size());
    r.values[i] = a * b / measure;
  });
  finish(r);
  return r;
}

ApReport matrix_ap_constant(const MatrixField& w, const ExponentFunction& p,
                            const CubeFamily& family, Execution exec) {
  check_grids(w.grid, p.grid());
  const MatrixField winv = inverse(w);
  const ExponentFunction q = conjugate(p);
  const auto cells = cube_cells(w.grid, family);
  const NormOptions opts = kernel_norm_options();
  const double vol = w.grid.cell_volume();
  const int d = w.dim;
  const std::size_t stride = w.stride();

  // one task per (cube, x) pair; F values land at fixed offsets
  std::vector<std::size_t> offset(cells.size() + 1, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) offset[i + 1] = offset[i] + cells[i].size();
  std::vector<std::size_t> task_cube(offset.back());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t k = offset[i]; k < offset[i + 1]; ++k) task_cube[k] = i;
  }
  std::vector<std::vector<double>> q_on(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) q_on[i] = gather(q.values(), cells[i]);

  std::vector<double> f_values(offset.back(), 0.0);
  for_each_index(offset.back(), exec, [&](std::size_t task) {
    const std::size_t i = task_cube[task];
    const auto& cs = cells[i];
    const std::size_t x = cs[task - offset[i]];
    const double* wx = w.values.data() + x * stride;
    std::vector<double> kernel(cs.size());
    for (std::size_t k = 0; k < cs.size(); ++k) {
      kernel[k] = product_norm(wx, winv.values.data() + cs[k] * stride, d);
    }
    f_values[task] = luxemburg_norm(kernel, q_on[i], vol, opts).value;
  });

  ApReport r;
  r.family = family;
  r.method = ApMethod::direct;
  r.values.assign(family.cubes.size(), 0.0);
  for_each_index(family.cubes.size(), exec, [&](std::size_t i) {
    std::span<const double> f(f_values.data() + offset[i], cells[i].size());
    const auto p_on = gather(p.values(), cells[i]);
    const double measure = vol * static_cast<double>(cells[i].size());
    r.values[i] = luxemburg_norm(f, p_on, vol, opts).value / measure;
  });
  finish(r);
  return r;
}

ApReport reducing_ap_constant(const MatrixField& w, const ExponentFunction& p,
                              const CubeFamily& family, Execution exec) {
  check_grids(w.grid, p.grid());
  const MatrixField winv = inverse(w);
  const ExponentFunction q = conjugate(p);
  const NormOptions opts = kernel_norm_options();
  ApReport r;
  r.family = family;
  r.method = ApMethod::reducing;
  r.values.assign(family.cubes.size(), 0.0);
  for_each_index(family.cubes.size(), exec, [&](std::size_t i) {
    const auto& cube = family.cubes[i];
    const ReducingOperator m = reducing_operator(w, p, cube, opts);
    const ReducingOperator mbar = reducing_operator(winv, q, cube, opts);
    r.values[i] = operator_norm(m.m * mbar.m);
  });
  finish(r);
  return r;
}

ApReport opnorm_weight_constant(const MatrixField& w, const ExponentFunction& p,
                                const CubeFamily& family, Execution exec) {
  return scalar_ap_constant(op_norm(w), p, family, exec);
}

WeightSumReport weight_sum_constant(const std::vector<ScalarField>& weights,
                                    const ExponentFunction& p, const CubeFamily& family,
                                    Execution exec) {
  if (weights.empty()) raise(ErrorKind::precondition, "weight sum of an empty list");
  WeightSumReport out;
  ScalarField total(weights.front().grid);
  for (const auto& w : weights) {
    check_grids(w.grid, total.grid);
    for (std::size_t c = 0; c < w.size(); ++c) total.values[c] += w.values[c];
    out.components.push_back(scalar_ap_constant(w, p, family, exec));
  }
  out.sum = scalar_ap_constant(total, p, family, exec);
  for (std::size_t i = 0; i < family.cubes.size(); ++i) {
    double bound = 0.0;
    for (const auto& c : out.components) bound += c.values[i];
    if (out.sum.values[i] > bound * (1.0 + 1e-9)) ++out.violations;
  }
  return out;
}

namespace {

double radius(const Point& x, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += x[k] * x[k];
  return std::sqrt(s);
}

double checked_power(const Grid& grid, std::size_t cell, double a) {
  const double r = radius(grid.center(cell), grid.dim());
  if (r == 0.0 && a < 0.0) {
    std::ostringstream msg;
    msg << "power weight |x|^" << a << " is singular at cell " << cell
        << "; shift the box by delta = h/2 = " << 0.5 * grid.min_width();
    raise(ErrorKind::singular_weight, msg.str());
  }
  return a == 0.0 ? 1.0 : std::pow(r, a);
}

}  // namespace

ScalarField make_power_weight(const Grid& grid, double a) {
  ScalarField w(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) w.values[c] = checked_power(grid, c, a);
  return w;
}

MatrixField make_rotating_weight(const Grid& grid, const std::function<double(const Point&)>& theta,
                                 double a, double b) {
  MatrixField w(grid, 2);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const double t = theta(grid.center(c));
    Eigen::Matrix2d rot;
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const Eigen::Vector2d diag(checked_power(grid, c, a), checked_power(grid, c, b));
    Eigen::Matrix2d m = rot * diag.asDiagonal() * rot.transpose();
    m = 0.5 * (m + m.transpose()).eval();
    w.at(c) = m;
  }
  return w;
}

MatrixField make_diagonal_weight(const Grid& grid, const std::vector<double>& exponents) {
  const int d = static_cast<int>(exponents.size());
  if (d < 1) raise(ErrorKind::invalid_input, "diagonal weight needs at least one exponent");
  MatrixField w(grid, d);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    auto m = w.at(c);
    m.setZero();
    for (int i = 0; i < d; ++i) m(i, i) = checked_power(grid, c, exponents[static_cast<std::size_t>(i)]);
  }
  return w;
}

MatrixField as_matrix_weight(const ScalarField& w) {
  MatrixField out(w.grid, 1);
  for (std::size_t c = 0; c < w.size(); ++c) out.values[c] = w.values[c];
  return out;
}

bool looks_divergent(const std::vector<double>& suprema, double factor) {
  if (suprema.size() < 2) return false;
  for (std::size_t i = 1; i < suprema.size(); ++i) {
    if (!(suprema[i] > suprema[i - 1])) return false;
  }
  return suprema.back() > factor * suprema.front();
}

}  // namespace vlw
