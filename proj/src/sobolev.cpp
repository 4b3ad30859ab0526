#include "vlw/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Core>

#include "vlw/error.hpp"
#include "vlw/matweight.hpp"
#include "vlw/operators.hpp"

namespace vlw {

VectorField JacobianField::column(int j) const {
  VectorField out(grid, rows);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    for (int i = 0; i < rows; ++i) out.at(c)[static_cast<std::size_t>(i)] = (*this)(c, i, j);
  }
  return out;
}

namespace {

void check_fd_grid(const Grid& g) {
  if (g.cells_per_axis() < 3) {
    raise(ErrorKind::invalid_domain, "finite differences need at least 3 cells per axis");
  }
}

// d_axis of component i of a cell-major field with `dim` components.
double difference(const Grid& g, const double* v, int dim, int i, std::size_t c, int axis) {
  auto idx = g.index(c);
  const int m = g.cells_per_axis();
  const double h = g.width(axis);
  const int at = idx[axis];
  auto value = [&](int k) {
    idx[axis] = k;
    return v[g.linear(idx) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i)];
  };
  if (at == 0) return (value(1) - value(0)) / h;
  if (at == m - 1) return (value(m - 1) - value(m - 2)) / h;
  return (value(at + 1) - value(at - 1)) / (2.0 * h);
}

void check_same(const Grid& a, const Grid& b) {
  if (!(a == b)) raise(ErrorKind::dimension_mismatch, "fields live on different grids");
}

NormResult masked_norm(std::vector<double> a, const ExponentFunction& p, double vol, CellMask mask) {
  if (!mask.empty()) {
    for (std::size_t c = 0; c < a.size(); ++c) {
      if (!mask[c]) a[c] = 0.0;
    }
  }
  return luxemburg_norm(a, p.values(), vol);
}

std::vector<double> weighted_magnitudes(const MatrixField& w, const double* v, int d,
                                        std::size_t cells) {
  std::vector<double> a(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    Eigen::Map<const Eigen::VectorXd> x(v + c * static_cast<std::size_t>(d), d);
    a[c] = (w.at(c) * x).norm();
  }
  return a;
}

}  // namespace

JacobianField jacobian(const VectorField& f) {
  check_fd_grid(f.grid);
  JacobianField out(f.grid, f.dim);
  for (std::size_t c = 0; c < f.grid.cell_count(); ++c) {
    for (int j = 0; j < f.grid.dim(); ++j) {
      for (int i = 0; i < f.dim; ++i) out(c, i, j) = difference(f.grid, f.values.data(), f.dim, i, c, j);
    }
  }
  return out;
}

ScalarField partial(const ScalarField& f, int axis) {
  check_fd_grid(f.grid);
  ScalarField out(f.grid);
  for (std::size_t c = 0; c < f.size(); ++c) out.values[c] = difference(f.grid, f.values.data(), 1, 0, c, axis);
  return out;
}

SobolevParts sobolev_norm_matrix(const VectorField& f, const JacobianField& df,
                                 const MatrixField& w, const ExponentFunction& p, CellMask mask) {
  check_same(f.grid, w.grid);
  check_same(f.grid, p.grid());
  if (w.dim != f.dim || df.rows != f.dim) raise(ErrorKind::dimension_mismatch, "weight, field and Jacobian dimensions differ");
  const std::size_t cells = f.grid.cell_count();
  const double vol = f.grid.cell_volume();
  SobolevParts r;
  r.zero_order = masked_norm(weighted_magnitudes(w, f.values.data(), f.dim, cells), p, vol, mask).value;
  std::vector<double> g(cells);
  const int d = df.rows;
  const int n = df.cols;
  for (std::size_t c = 0; c < cells; ++c) {
    Eigen::Map<const Eigen::MatrixXd> jac(df.values.data() + c * static_cast<std::size_t>(d * n), d, n);
    g[c] = operator_norm(w.at(c) * jac);
  }
  r.gradient = masked_norm(std::move(g), p, vol, mask).value;
  r.total = r.zero_order + r.gradient;
  return r;
}

SobolevParts sobolev_norm_matrix(const VectorField& f, const MatrixField& w,
                                 const ExponentFunction& p, CellMask mask) {
  return sobolev_norm_matrix(f, jacobian(f), w, p, mask);
}

SobolevParts sobolev_norm_sum(const VectorField& f, const MatrixField& w,
                              const ExponentFunction& p, CellMask mask) {
  check_same(f.grid, w.grid);
  check_same(f.grid, p.grid());
  if (w.dim != f.dim) raise(ErrorKind::dimension_mismatch, "weight and field dimensions differ");
  const std::size_t cells = f.grid.cell_count();
  const double vol = f.grid.cell_volume();
  const JacobianField df = jacobian(f);
  SobolevParts r;
  r.zero_order = masked_norm(weighted_magnitudes(w, f.values.data(), f.dim, cells), p, vol, mask).value;
  for (int j = 0; j < df.cols; ++j) {
    const VectorField col = df.column(j);
    r.gradient += masked_norm(weighted_magnitudes(w, col.values.data(), f.dim, cells), p, vol, mask).value;
  }
  r.total = r.zero_order + r.gradient;
  return r;
}

SobolevParts sobolev_norm_scalar(const ScalarField& f, const MatrixField& w,
                                 const ExponentFunction& p) {
  check_same(f.grid, w.grid);
  check_same(f.grid, p.grid());
  if (w.dim != f.grid.dim()) raise(ErrorKind::dimension_mismatch, "scalar Sobolev norm needs an n x n weight");
  const ScalarField v = op_norm(w);
  SobolevParts r;
  r.zero_order = scalar_weighted_norm(f, v, p).value;
  const JacobianField grad = jacobian(VectorField::from_scalar(f));
  // the gradient of a scalar field, one row per axis
  VectorField g(f.grid, f.grid.dim());
  for (std::size_t c = 0; c < f.size(); ++c) {
    for (int j = 0; j < f.grid.dim(); ++j) g.at(c)[static_cast<std::size_t>(j)] = grad(c, 0, j);
  }
  r.gradient = matrix_weighted_norm(w, g, p).value;
  r.total = r.zero_order + r.gradient;
  return r;
}

bool Domain::contains(const Point& x, int n) const {
  if (kind == Kind::box) return true;
  double r2 = 0.0;
  for (int a = 0; a < n; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
  return std::sqrt(r2) > radius;
}

double Domain::distance_to_boundary(const Grid& grid, const Point& x) const {
  const int n = grid.dim();
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) d = std::min({d, x[a] - grid.lower(a), grid.upper(a) - x[a]});
  if (kind == Kind::box_minus_ball) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    d = std::min(d, std::sqrt(r2) - radius);
  }
  return std::max(d, 0.0);
}

std::vector<std::uint8_t> domain_mask(const Grid& grid, const Domain& domain) {
  std::vector<std::uint8_t> mask(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) mask[c] = domain.contains(grid.center(c), grid.dim()) ? 1 : 0;
  return mask;
}

PartitionOfUnity build_partition(const Grid& grid, const Domain& domain, int shells) {
  if (shells < 3) raise(ErrorKind::precondition, "partition needs at least 3 shells");
  PartitionOfUnity pu;
  pu.shells = shells;
  pu.mask = domain_mask(grid, domain);
  pu.distance = ScalarField(grid);
  double dmax = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!pu.mask[c]) continue;
    pu.distance.values[c] = domain.distance_to_boundary(grid, grid.center(c));
    dmax = std::max(dmax, pu.distance.values[c]);
  }
  pu.spacing = dmax / shells;
  const double h = grid.min_width();
  if (pu.spacing < 2.0 * h) {
    std::ostringstream msg;
    msg << shells << " shells give spacing " << pu.spacing << " below 2h = " << 2.0 * h;
    raise(ErrorKind::resolution_limit, msg.str());
  }
  const double s = pu.spacing;
  pu.psi.assign(static_cast<std::size_t>(shells), ScalarField(grid));
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!pu.mask[c]) continue;
    const double dist = pu.distance.values[c];
    double total = 0.0;
    for (int k = 1; k <= shells; ++k) {
      const double centre = (shells - k) * s;
      const double u = (dist - centre) / s;
      double eta = 0.0;
      if (k == 1 && dist >= centre) {
        eta = 1.0;
      } else if (std::abs(u) < 1.0) {
        eta = std::exp(1.0 - 1.0 / (1.0 - u * u));
      }
      pu.psi[static_cast<std::size_t>(k - 1)].values[c] = eta;
      total += eta;
    }
    for (auto& psi : pu.psi) psi.values[c] /= total;
  }
  return pu;
}

SmoothingResult smooth_approximate(const VectorField& f, const MatrixField& w,
                                   const ExponentFunction& p, double epsilon,
                                   const SmoothingOptions& opts, Execution exec) {
  check_same(f.grid, w.grid);
  check_same(f.grid, p.grid());
  if (w.dim != f.dim) raise(ErrorKind::dimension_mismatch, "weight and field dimensions differ");
  if (!(epsilon > 0.0)) raise(ErrorKind::invalid_input, "epsilon must be positive");
  const Grid& grid = f.grid;
  const int n = grid.dim();
  const double h = grid.min_width();
  const double vol = grid.cell_volume();
  const std::size_t cells = grid.cell_count();
  const PartitionOfUnity pu = build_partition(grid, opts.domain, opts.shells);
  const CellMask mask(pu.mask);

  SmoothingResult res;
  res.epsilon = epsilon;
  res.g = VectorField(grid, f.dim);

  auto weighted_error = [&](const VectorField& a, const VectorField& b) {
    std::vector<double> diff(a.values.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = a.values[k] - b.values[k];
    return masked_norm(weighted_magnitudes(w, diff.data(), f.dim, cells), p, vol, mask).value;
  };
  const double t_min = opts.min_t > 0.0 ? opts.min_t : h;
  if (t_min < h * (1.0 - 1e-12)) raise(ErrorKind::invalid_input, "min_t is below the cell width");
  auto too_fine = [&](int shell) {
    std::ostringstream msg;
    msg << "shell " << shell << ": budget not met at the smallest resolvable scale t = " << t_min
        << " (h = " << h << ")";
    raise(ErrorKind::resolution_limit, msg.str());
  };
  // next trial scale: halve, but land on t_min once before giving up
  auto next_scale = [&](int shell, double t, ShellRow& row) {
    if (t <= t_min * (1.0 + 1e-12) || row.halvings >= opts.max_halvings) too_fine(shell);
    ++row.halvings;
    return std::max(0.5 * t, t_min);
  };

  for (int k = 1; k <= opts.shells; ++k) {
    const ScalarField& psi = pu.psi[static_cast<std::size_t>(k - 1)];
    VectorField piece(grid, f.dim);
    for (std::size_t c = 0; c < cells; ++c) {
      for (int i = 0; i < f.dim; ++i) {
        piece.at(c)[static_cast<std::size_t>(i)] = psi.values[c] * f.at(c)[static_cast<std::size_t>(i)];
      }
    }
    const JacobianField dpiece = jacobian(piece);
    ShellRow row;
    row.shell = k;
    row.zero_budget = epsilon / std::ldexp(1.0, k + 1);
    row.gradient_budget = epsilon / (n * std::ldexp(1.0, k + 1));

    double t = std::max(pu.spacing, t_min);
    VectorField smoothed;
    // first s_k for the piece itself
    for (;;) {
      smoothed = convolve(piece, make_mollifier(grid, t), exec);
      row.zero_error = weighted_error(piece, smoothed);
      if (row.zero_error < row.zero_budget) break;
      t = next_scale(k, t, row);
    }
    row.s = t;
    // then t_k <= s_k for the derivatives
    for (;;) {
      const JacobianField dsmooth = jacobian(smoothed);
      row.gradient_errors.assign(static_cast<std::size_t>(n), 0.0);
      bool ok = row.zero_error < row.zero_budget;
      for (int j = 0; j < n; ++j) {
        const VectorField a = dpiece.column(j);
        const VectorField b = dsmooth.column(j);
        row.gradient_errors[static_cast<std::size_t>(j)] = weighted_error(a, b);
        ok = ok && row.gradient_errors[static_cast<std::size_t>(j)] < row.gradient_budget;
      }
      if (ok) break;
      t = next_scale(k, t, row);
      smoothed = convolve(piece, make_mollifier(grid, t), exec);
      row.zero_error = weighted_error(piece, smoothed);
    }
    row.t = t;
    for (std::size_t q = 0; q < res.g.values.size(); ++q) res.g.values[q] += smoothed.values[q];
    res.shells.push_back(std::move(row));
  }

  VectorField diff(grid, f.dim);
  for (std::size_t q = 0; q < diff.values.size(); ++q) diff.values[q] = f.values[q] - res.g.values[q];
  res.error = sobolev_norm_matrix(diff, w, p, mask);
  res.error_sum_form = sobolev_norm_sum(diff, w, p, mask).total;
  res.success = res.error.total < epsilon;
  return res;
}

double smooth_step(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  return a / (a + b);
}

double smooth_step_derivative(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - u));
  const double b = std::exp(-1.0 / u);
  const double s = a + b;
  return -a * b * (1.0 / ((1.0 - u) * (1.0 - u)) + 1.0 / (u * u)) / (s * s);
}

TruncationResult truncate_to_compact(const VectorField& g, const MatrixField& w,
                                     const ExponentFunction& p, double epsilon, int k_max) {
  check_same(g.grid, w.grid);
  check_same(g.grid, p.grid());
  if (k_max < 1) raise(ErrorKind::invalid_input, "truncation needs k_max >= 1");
  const Grid& grid = g.grid;
  const int n = grid.dim();
  const int d = g.dim;
  const std::size_t cells = grid.cell_count();
  const JacobianField dg = jacobian(g);

  TruncationResult res;
  for (int k = 1; k <= k_max; ++k) {
    VectorField e(grid, d);
    JacobianField de(grid, d);
    std::vector<double> nu(cells);
    double max_grad = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const Point x = grid.center(c);
      double r = 0.0;
      for (int a = 0; a < n; ++a) r += x[a] * x[a];
      r = std::sqrt(r);
      const double u = (r - k) / k;
      nu[c] = smooth_step(u);
      const double dnu = smooth_step_derivative(u) / k;
      max_grad = std::max(max_grad, std::abs(dnu));
      for (int i = 0; i < d; ++i) {
        const double gi = g.at(c)[static_cast<std::size_t>(i)];
        e.at(c)[static_cast<std::size_t>(i)] = (1.0 - nu[c]) * gi;
        for (int j = 0; j < n; ++j) {
          const double grad_nu_j = r > 0.0 ? dnu * x[j] / r : 0.0;
          // d_j (g - nu g) = (1 - nu) d_j g - g d_j nu
          de(c, i, j) = (1.0 - nu[c]) * dg(c, i, j) - gi * grad_nu_j;
        }
      }
    }
    const SobolevParts err = sobolev_norm_matrix(e, de, w, p);
    TruncationRow row;
    row.k = k;
    row.zero_error = err.zero_order;
    row.gradient_error = err.gradient;
    row.total = err.total;
    row.max_grad_nu = max_grad;
    row.scaled_grad_nu = max_grad * k;
    res.envelope = std::max(res.envelope, row.scaled_grad_nu);
    if (res.k_star == 0 && row.total < epsilon) {
      res.k_star = k;
      res.g_k = VectorField(grid, d);
      for (std::size_t c = 0; c < cells; ++c) {
        for (int i = 0; i < d; ++i) {
          res.g_k.at(c)[static_cast<std::size_t>(i)] = nu[c] * g.at(c)[static_cast<std::size_t>(i)];
        }
      }
    }
    res.rows.push_back(row);
  }
  res.monotone = true;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    if (res.rows[i].total > res.rows[i - 1].total * (1.0 + 1e-12)) res.monotone = false;
  }
  if (res.k_star == 0) {
    std::ostringstream msg;
    msg << "no cutoff radius k <= " << k_max << " meets epsilon = " << epsilon
        << " (best " << res.rows.back().total << "); enlarge the box";
    raise(ErrorKind::resolution_limit, msg.str());
  }
  return res;
}

}  // namespace vlw
