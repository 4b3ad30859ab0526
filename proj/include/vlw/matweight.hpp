#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "vlw/exponent.hpp"
#include "vlw/grid.hpp"
#include "vlw/varnorm.hpp"

namespace vlw {

/// Operator (spectral) norm of a small dense matrix, any shape.
double operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& a);

ScalarField op_norm(const MatrixField& w);
/// Pointwise inverse through reciprocal eigenvalues. Throws singular_weight
/// naming the first cell whose smallest eigenvalue is <= 1e-14.
MatrixField inverse(const MatrixField& w);

struct Eigendecomposition {
  MatrixField vectors;  // orthogonal U per cell, columns are eigenvectors
  MatrixField values;   // diagonal Lambda per cell, ascending
};
Eigendecomposition eigendecompose(const MatrixField& w);

/// Symmetric square root of an SPD matrix.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& a);

/// A norm on R^d given as a callable.
using DirectionNorm = std::function<double(const Eigen::VectorXd&)>;

/// v -> |Q|^{-1/p_Q} || |W(.) v| chi_Q ||_p.
class NormSampler {
 public:
  NormSampler(const MatrixField& w, const ExponentFunction& p, const Cube& q,
              const NormOptions& opts = {});

  double operator()(const Eigen::VectorXd& v) const;
  int dim() const { return dim_; }
  double harmonic_mean() const { return p_q_; }
  double scale() const { return scale_; }
  std::size_t cell_count() const { return p_.size(); }

 private:
  int dim_ = 1;
  std::vector<Eigen::MatrixXd> w_;
  std::vector<double> p_;
  double vol_ = 1.0;
  double p_q_ = 1.0;
  double scale_ = 1.0;
  NormOptions opts_;
};

/// Directions used for fitting: exact for d = 1, N = 64 uniform half-circle
/// angles for d = 2, N = 512 Fibonacci-sphere points for d = 3, seeded
/// Gaussian directions above.
std::vector<Eigen::VectorXd> fitting_directions(int d);

struct EllipsoidFit {
  Eigen::MatrixXd m;    // sqrt(d) * m0: r(v) <= |M v| <= sqrt(d) r(v)
  Eigen::MatrixXd m0;   // enclosing ellipsoid {v : |m0 v| <= 1} of the unit ball of r
  int iterations = 0;   // total Khachiyan iterations
  int rounds = 0;       // cutting-plane refinement rounds
  std::size_t points = 0;
};

struct KhachiyanResult {
  Eigen::MatrixXd shape;  // A with {v : v^T A v <= 1} containing every point
  int iterations = 0;
};

/// Minimum-volume origin-centred ellipsoid enclosing {+-q_i}, by barycentric
/// coordinate ascent with Todd-Yildirim away steps.
KhachiyanResult khachiyan_mvee(const std::vector<Eigen::VectorXd>& points, double tol = 1e-9,
                               int max_iterations = 200000);

EllipsoidFit john_fit(const DirectionNorm& r, int d);

struct Certificate {
  double min_ratio = 0.0;  // min |M v| / r(v)
  double max_ratio = 0.0;  // max |M v| / r(v)
};
Certificate sandwich_certificate(const DirectionNorm& r, const Eigen::MatrixXd& m,
                                 const std::vector<Eigen::VectorXd>& directions);

struct ReducingOperator {
  Cube cube;
  Eigen::MatrixXd m;
  Certificate certificate;
};

ReducingOperator reducing_operator(const MatrixField& w, const ExponentFunction& p,
                                   const Cube& q, const NormOptions& opts = {});
/// Reducing operator of r*(x, v) = |W^{-1}(x) v| under p'(.).
ReducingOperator dual_reducing_operator(const MatrixField& w, const ExponentFunction& p,
                                        const Cube& q, const NormOptions& opts = {});

}  // namespace vlw
