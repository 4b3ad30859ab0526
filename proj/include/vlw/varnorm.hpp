#pragma once

#include <span>
#include <vector>

#include "vlw/exponent.hpp"
#include "vlw/grid.hpp"

namespace vlw {

struct NormOptions {
  double rel_tol = 1e-10;
  int max_iterations = 200;
};

struct NormResult {
  double value = 0.0;
  int iterations = 0;
  double bracket_width = 0.0;
  bool capped = false;  // iteration cap hit before the bracket closed
};

/// Modular of cell magnitudes `a` against per-cell exponents `p` on cells of
/// volume `cell_volume`: sum of a^p * vol over finite-p cells plus the max of
/// `a` over infinite-p cells. Returns +inf on overflow.
double modular(std::span<const double> a, std::span<const double> p, double cell_volume);

/// Luxemburg norm inf{lambda > 0 : modular(a / lambda) <= 1} by bisection.
/// Magnitudes must be finite and non-negative.
NormResult luxemburg_norm(std::span<const double> a, std::span<const double> p,
                          double cell_volume, const NormOptions& opts = {});

double modular(const ScalarField& f, const ExponentFunction& p);
NormResult luxemburg_norm(const ScalarField& f, const ExponentFunction& p,
                          const NormOptions& opts = {});
/// Norm of f * chi_Q.
NormResult luxemburg_norm(const ScalarField& f, const ExponentFunction& p, const Cube& q,
                          const NormOptions& opts = {});
/// Norm of a restricted to the listed cells (a indexed by grid cell).
NormResult luxemburg_norm_on(std::span<const double> a, const ExponentFunction& p,
                             std::span<const std::size_t> cells,
                             const NormOptions& opts = {});

NormResult vector_norm(const VectorField& f, const ExponentFunction& p,
                       const NormOptions& opts = {});
NormResult matrix_weighted_norm(const MatrixField& w, const VectorField& f,
                                const ExponentFunction& p, const NormOptions& opts = {});
NormResult scalar_weighted_norm(const ScalarField& f, const ScalarField& w,
                                const ExponentFunction& p, const NormOptions& opts = {});

/// Pointwise |W(x) f(x)|.
ScalarField weighted_magnitude(const MatrixField& w, const VectorField& f);
/// Pointwise |f(x)|.
ScalarField magnitude(const VectorField& f);

struct HolderPairing {
  double lhs = 0.0;  // integral of |fg|
  double rhs = 0.0;  // constant * ||f||_p * ||g||_p'
  double norm_f = 0.0;
  double norm_g = 0.0;
};

HolderPairing holder_pairing(const ScalarField& f, const ScalarField& g,
                             const ExponentFunction& p, double constant = 4.0);

struct DualWitness {
  VectorField g;
  double norm_f = 0.0;         // ||f||_p
  double norm_f_l1 = 0.0;      // || |f|_1 ||_p
  double norm_g = 0.0;         // ||g||_p'
  double pairing = 0.0;        // integral of f . g
  bool zero_input = false;
  bool contract_holds = false;  // norm_g <= d and norm_f_l1 <= 4 * pairing
};

/// Componentwise extremal witness for the vector duality inequality.
DualWitness dual_witness(const VectorField& f, const ExponentFunction& p);

/// sum_Q ||chi_Q f||_p ||chi_Q g||_p' / (||f||_p ||g||_p') over a disjoint family.
double property_g_ratio(const ScalarField& f, const ScalarField& g, const ExponentFunction& p,
                        const CubeFamily& family);

}  // namespace vlw
