#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vlw/exponent.hpp"
#include "vlw/grid.hpp"
#include "vlw/parallel.hpp"
#include "vlw/varnorm.hpp"

namespace vlw {

/// Per-cell d x n Jacobian, column-major: values[cell * d * n + j * d + i] = d_j f_i.
struct JacobianField {
  Grid grid;
  int rows = 1;  // d
  int cols = 1;  // n
  std::vector<double> values;

  JacobianField() = default;
  JacobianField(const Grid& g, int d)
      : grid(g), rows(d), cols(g.dim()),
        values(g.cell_count() * static_cast<std::size_t>(d * g.dim()), 0.0) {}

  double& operator()(std::size_t cell, int i, int j) {
    return values[cell * static_cast<std::size_t>(rows * cols) + static_cast<std::size_t>(j * rows + i)];
  }
  double operator()(std::size_t cell, int i, int j) const {
    return values[cell * static_cast<std::size_t>(rows * cols) + static_cast<std::size_t>(j * rows + i)];
  }
  /// Column j as a vector field (d_j f).
  VectorField column(int j) const;
};

/// Central differences inside, one-sided first order at boundary cells.
/// Needs at least 3 cells per axis.
JacobianField jacobian(const VectorField& f);
ScalarField partial(const ScalarField& f, int axis);

/// Cells taking part in a norm; empty means every cell.
using CellMask = std::span<const std::uint8_t>;

struct SobolevParts {
  double zero_order = 0.0;
  double gradient = 0.0;  // gradient term of the chosen form
  double total = 0.0;
};

/// ||f||_{L^p(W)} + || |W Df|_op ||_p.
SobolevParts sobolev_norm_matrix(const VectorField& f, const MatrixField& w,
                                 const ExponentFunction& p, CellMask mask = {});
/// ||f||_{L^p(W)} + sum_j ||d_j f||_{L^p(W)}.
SobolevParts sobolev_norm_sum(const VectorField& f, const MatrixField& w,
                              const ExponentFunction& p, CellMask mask = {});
/// ||f |W|_op||_p + ||grad f||_{L^p(W)} for an n x n weight.
SobolevParts sobolev_norm_scalar(const ScalarField& f, const MatrixField& w,
                                 const ExponentFunction& p);

/// Same quantities from an explicit Jacobian instead of finite differences.
SobolevParts sobolev_norm_matrix(const VectorField& f, const JacobianField& df,
                                 const MatrixField& w, const ExponentFunction& p,
                                 CellMask mask = {});

struct Domain {
  enum class Kind { box, box_minus_ball } kind = Kind::box;
  Point center{};
  double radius = 0.0;

  bool contains(const Point& x, int n) const;
  /// Distance from x to the boundary of the domain inside the grid box.
  double distance_to_boundary(const Grid& grid, const Point& x) const;
};

std::vector<std::uint8_t> domain_mask(const Grid& grid, const Domain& domain);

struct PartitionOfUnity {
  int shells = 0;      // K
  double spacing = 0.0;  // s: Omega_k = {dist > (K - k) s}
  ScalarField distance;
  std::vector<std::uint8_t> mask;
  std::vector<ScalarField> psi;  // psi[k - 1] for shell k = 1..K, k = 1 innermost
};

/// Shell partition with smooth bumps in dist / s centred at (K - k) s and
/// renormalised to sum one. Shells thinner than 2h are a resolution_limit error.
PartitionOfUnity build_partition(const Grid& grid, const Domain& domain, int shells);

struct ShellRow {
  int shell = 0;
  double s = 0.0;
  double t = 0.0;
  double zero_error = 0.0;
  std::vector<double> gradient_errors;  // per axis j
  double zero_budget = 0.0;
  double gradient_budget = 0.0;
  int halvings = 0;
};

struct SmoothingResult {
  VectorField g;
  std::vector<ShellRow> shells;
  SobolevParts error;       // ||f - g|| in the matrix form
  double error_sum_form = 0.0;
  double epsilon = 0.0;
  bool success = false;
};

struct SmoothingOptions {
  int shells = 4;
  int max_halvings = 20;
  /// Smallest smoothing scale tried; 0 means the cell width h, where the
  /// kernel is a single-cell delta. The last halving is clamped to it.
  double min_t = 0.0;
  Domain domain;
};

/// g = sum_k phi_{t_k} * (psi_k f) with per-shell budgets eps / 2^{k+1} for the
/// piece and eps / (n 2^{k+1}) for each partial derivative. Raises
/// resolution_limit naming the shell when a budget needs t below the cell width.
SmoothingResult smooth_approximate(const VectorField& f, const MatrixField& w,
                                   const ExponentFunction& p, double epsilon,
                                   const SmoothingOptions& opts = {},
                                   Execution exec = Execution::parallel);

/// Smooth step: 1 for u <= 0, 0 for u >= 1.
double smooth_step(double u);
double smooth_step_derivative(double u);

struct TruncationRow {
  int k = 0;
  double zero_error = 0.0;
  double gradient_error = 0.0;
  double total = 0.0;
  double max_grad_nu = 0.0;
  double scaled_grad_nu = 0.0;  // max |grad nu_k| * k
};

struct TruncationResult {
  std::vector<TruncationRow> rows;
  VectorField g_k;  // nu_k g for the first k meeting epsilon
  int k_star = 0;
  double envelope = 0.0;  // max over k of max |grad nu_k| * k
  bool monotone = false;
};

/// nu_k(x) = S((|x| - k) / k), errors ||g - nu_k g|| in the matrix Sobolev form
/// using the product rule with the analytic gradient of nu_k. Raises
/// resolution_limit when no k up to `k_max` meets epsilon.
TruncationResult truncate_to_compact(const VectorField& g, const MatrixField& w,
                                     const ExponentFunction& p, double epsilon, int k_max);

}  // namespace vlw
