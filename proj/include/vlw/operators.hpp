#pragma once

#include <array>
#include <optional>
#include <vector>

#include "vlw/exponent.hpp"
#include "vlw/grid.hpp"
#include "vlw/parallel.hpp"
#include "vlw/varnorm.hpp"

namespace vlw {

/// Convolution weights at integer cell offsets; weights are masses summing to 1.
struct DiscreteKernel {
  int dim = 1;
  std::vector<std::array<int, 3>> offsets;
  std::vector<double> weights;
  double radius = 0.0;  // support radius in physical units

  double mass() const;
};

/// Bump exp(-1/(1 - |x|^2)) on the unit ball.
double bump_profile(double r);

/// phi_t sampled at offsets k with |k h| < t and normalised to unit mass.
/// t below the smallest cell width is a resolution_limit error.
DiscreteKernel make_mollifier(const Grid& grid, double t);

/// |Q|^{-1} chi_Q for an origin-centred cube, as uniform weights on the
/// offsets whose physical position lies in Q.
DiscreteKernel make_box_kernel(const Grid& grid, const Cube& q);

/// Zero-extended discrete convolution sum_k w_k f(x - k h).
ScalarField convolve(const ScalarField& f, const DiscreteKernel& k,
                     Execution exec = Execution::parallel);
VectorField convolve(const VectorField& f, const DiscreteKernel& k,
                     Execution exec = Execution::parallel);

/// Mean of f over Q placed on Q's cells, zero elsewhere.
VectorField average_on_cube(const VectorField& f, const Cube& q);
/// Superposition of per-cube averages over a disjoint family.
VectorField average_on_family(const VectorField& f, const CubeFamily& family);

struct AveragingCheck {
  double lhs = 0.0;     // ||A_Q f||_{L^p(W)}
  double rhs = 0.0;     // 4 [W] ||f||_{L^p(W)}
  double norm_f = 0.0;
  bool holds = false;   // lhs <= rhs with 1e-9 relative slack
};

/// Single-cube bound with the supplied constant [W].
AveragingCheck averaging_bound_check(const MatrixField& w, const ExponentFunction& p,
                                     const VectorField& f, const Cube& q, double ap_constant);
/// Family version: lhs and ||f|| only (rhs left at 0, holds left false).
AveragingCheck averaging_family_check(const MatrixField& w, const ExponentFunction& p,
                                      const VectorField& f, const CubeFamily& family);

struct TiledBound {
  double lhs = 0.0;  // || |Q|^{-1} chi_Q * f ||_{L^p(W)}
  double norm_f = 0.0;
  double ap_constant = 0.0;
  double ratio = 0.0;  // lhs / ([W] ||f||), 0 when f = 0
  CubeFamily tiling;   // translates Q_k meeting the box
  CubeFamily covers;   // 3 Q_k
};

TiledBound tiled_convolution_bound(const MatrixField& w, const ExponentFunction& p,
                                   const VectorField& f, const Cube& q, double ap_constant);

struct LayerCakeMixture {
  DiscreteKernel source;
  std::vector<double> a;                        // a_k = gap * |B_k|
  std::vector<std::vector<std::size_t>> balls;  // B_k as indices into source.offsets

  /// Sum_k a_k |B_k|^{-1} chi_{B_k} as kernel masses on the source offsets.
  DiscreteKernel mixture() const;
  /// max over offsets of (phi - Phi) / max phi.
  double sup_gap() const;
  double total_weight() const;
};

/// Level slicing of the kernel at heights k max(phi) / K, k = 1..K; B_k is the
/// superlevel set of height k, empty levels are dropped.
LayerCakeMixture layer_cake(const DiscreteKernel& kernel, int levels);

struct MinkowskiCheck {
  double lhs = 0.0;  // ||Phi * f||_{L^p(W)}
  double rhs = 0.0;  // sum_k a_k ||avg_{B_k} * f||_{L^p(W)}
};
MinkowskiCheck layer_cake_minkowski(const MatrixField& w, const ExponentFunction& p,
                                    const VectorField& f, const LayerCakeMixture& mix);

/// t0, t0/2, ... while t >= t_min.
std::vector<double> geometric_schedule(double t0, double t_min, double ratio = 0.5);

struct StudyRow {
  double t = 0.0;
  double error = 0.0;  // ||phi_t * f - f||_{L^p(W)}
  double norm = 0.0;   // ||phi_t * f||_{L^p(W)}
  double ratio = 0.0;  // norm / ([W] ||f||)
};

struct IdentityStudy {
  std::vector<StudyRow> rows;
  double norm_f = 0.0;
  double ap_constant = 0.0;
  double c_emp = 0.0;  // sup_t norm / ([W] ||f||)
  bool strictly_decreasing = false;
};

IdentityStudy approximate_identity_study(const MatrixField& w, const ExponentFunction& p,
                                         const VectorField& f, const std::vector<double>& schedule,
                                         double ap_constant, Execution exec = Execution::parallel);

}  // namespace vlw
