#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vlw/exponent.hpp"
#include "vlw/grid.hpp"
#include "vlw/matweight.hpp"
#include "vlw/parallel.hpp"
#include "vlw/varnorm.hpp"

namespace vlw {

enum class ApMethod { direct, reducing };

struct ApReport {
  std::vector<double> values;  // one per cube, in family order
  double supremum = 0.0;
  CubeFamily family;
  ApMethod method = ApMethod::direct;
};

/// Tolerance used for the norms inside the constant kernels. Tighter than the
/// library default so that identities between the constants hold to 1e-10.
NormOptions kernel_norm_options();

/// |Q|^{-1} ||w chi_Q||_p ||w^{-1} chi_Q||_p' per cube.
ApReport scalar_ap_constant(const ScalarField& w, const ExponentFunction& p,
                            const CubeFamily& family, Execution exec = Execution::parallel);

/// |Q|^{-1} || || |W(x) W^{-1}(y)|_op chi_Q(y) ||_{p', y} chi_Q(x) ||_{p, x} per cube.
ApReport matrix_ap_constant(const MatrixField& w, const ExponentFunction& p,
                            const CubeFamily& family, Execution exec = Execution::parallel);

/// |M_Q Mbar_Q|_op per cube from the primal and dual reducing operators.
ApReport reducing_ap_constant(const MatrixField& w, const ExponentFunction& p,
                              const CubeFamily& family, Execution exec = Execution::parallel);

/// Scalar constant of x -> |W(x)|_op.
ApReport opnorm_weight_constant(const MatrixField& w, const ExponentFunction& p,
                                const CubeFamily& family, Execution exec = Execution::parallel);

struct WeightSumReport {
  ApReport sum;
  std::vector<ApReport> components;
  std::size_t violations = 0;  // cubes with [sum w_j]_Q > sum_j [w_j]_Q (1e-9 slack)
};
WeightSumReport weight_sum_constant(const std::vector<ScalarField>& weights,
                                    const ExponentFunction& p, const CubeFamily& family,
                                    Execution exec = Execution::parallel);

/// w(x) = |x|^a. A cell centre at the origin with a < 0 is a singular_weight error.
ScalarField make_power_weight(const Grid& grid, double a);
/// W(x) = R(theta(x)) diag(|x|^a, |x|^b) R(theta(x))^T, d = 2.
MatrixField make_rotating_weight(const Grid& grid, const std::function<double(const Point&)>& theta,
                                 double a, double b);
/// W(x) = diag(|x|^{a_1}, ..., |x|^{a_d}).
MatrixField make_diagonal_weight(const Grid& grid, const std::vector<double>& exponents);
/// 1 x 1 matrix field holding w.
MatrixField as_matrix_weight(const ScalarField& w);

/// Heuristic divergence flag for a refinement sweep of suprema: true when the
/// sequence keeps growing and the last value exceeds `factor` times the first.
bool looks_divergent(const std::vector<double>& suprema, double factor = 4.0);

}  // namespace vlw
