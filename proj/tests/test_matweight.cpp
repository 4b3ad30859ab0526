#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "support.hpp"
#include "vlw/error.hpp"
#include "vlw/matweight.hpp"
#include "vlw/muckenhoupt.hpp"

using namespace vlw;
using testing::line;

namespace {

Eigen::MatrixXd random_spd(testing::Rng& r, int d) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = r.uniform(-1.0, 1.0);
  return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::VectorXd angle(double t) {
  Eigen::VectorXd v(2);
  v << std::cos(t), std::sin(t);
  return v;
}

}  // namespace

TEST_CASE("pointwise helpers") {
  const Grid g = line(4);
  MatrixField w(g, 2);
  for (std::size_t c = 0; c < g.cell_count(); ++c) w.at(c) << 2.0, 0.0, 0.0, 3.0;
  for (double v : op_norm(w).values) CHECK(v == doctest::Approx(3.0));

  const MatrixField id = MatrixField::identity(g, 3);
  const MatrixField inv = inverse(id);
  const Eigendecomposition ed = eigendecompose(id);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(inv.at(c).isApprox(Eigen::MatrixXd::Identity(3, 3)));
    CHECK(ed.vectors.at(c).cwiseAbs().isApprox(Eigen::MatrixXd::Identity(3, 3)));
  }
}

TEST_CASE("property: eigendecomposition reconstructs random SPD") {
  testing::Rng r(31);
  const Grid g = line(8);
  for (int d = 1; d <= 3; ++d) {
    MatrixField w(g, d);
    for (std::size_t c = 0; c < g.cell_count(); ++c) w.at(c) = random_spd(r, d);
    const Eigendecomposition ed = eigendecompose(w);
    const MatrixField inv = inverse(w);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      const Eigen::MatrixXd rec = ed.vectors.at(c) * ed.values.at(c) * ed.vectors.at(c).transpose();
      CHECK((rec - w.at(c)).norm() < 1e-10);
      CHECK(operator_norm(w.at(c)) <= w.at(c).trace() + 1e-12);
      CHECK((inv.at(c) * w.at(c) - Eigen::MatrixXd::Identity(d, d)).norm() < 1e-10);
      // closed forms against the eigen route
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.at(c));
      CHECK(operator_norm(w.at(c)) == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
    }
  }
}

TEST_CASE("singular weight names the cell") {
  const Grid g = line(4);
  MatrixField w = MatrixField::identity(g, 2);
  w.at(2) << 1.0, 0.0, 0.0, 0.0;
  try {
    (void)inverse(w);
    FAIL("expected singular_weight");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_weight);
    CHECK(std::string(e.what()).find("cell 2") != std::string::npos);
  }
}

TEST_CASE("khachiyan on an analytic ellipse") {
  // unit ball of |A v| with A = diag(1, 2): the ellipsoid is its own John ellipsoid
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 2.0;
  const DirectionNorm r = [&](const Eigen::VectorXd& v) { return (a * v).norm(); };
  const EllipsoidFit fit = john_fit(r, 2);
  const Eigen::MatrixXd gram = fit.m0.transpose() * fit.m0;
  CHECK((gram - a.transpose() * a).norm() < 1e-6);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::VectorXd v = angle(2.0 * std::numbers::pi * k / 1000.0 + 0.001);
    const double ratio = (fit.m * v).norm() / r(v);
    CHECK(ratio >= 1.0 - 1e-9);
    CHECK(ratio <= std::sqrt(2.0) + 1e-9);
  }
}

TEST_CASE("john fit of the square") {
  const DirectionNorm sup = [](const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); };
  const EllipsoidFit fit = john_fit(sup, 2);
  const Eigen::MatrixXd gram = fit.m0.transpose() * fit.m0;
  CHECK((gram - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-6);
  double hi = 0.0;
  double lo = 10.0;
  for (int k = 0; k < 4000; ++k) {
    const Eigen::VectorXd v = angle(2.0 * std::numbers::pi * k / 4000.0);
    hi = std::max(hi, (fit.m * v).norm() / sup(v));
    lo = std::min(lo, (fit.m * v).norm() / sup(v));
  }
  CHECK(lo >= 1.0 - 1e-9);
  CHECK(hi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("property: john fit sandwich in three dimensions") {
  testing::Rng r(77);
  for (int t = 0; t < 3; ++t) {
    const Eigen::MatrixXd a = random_spd(r, 3);
    // l^1 norm of A v: a polytope, far from an ellipsoid
    const DirectionNorm l1 = [&](const Eigen::VectorXd& v) { return (a * v).lpNorm<1>(); };
    const EllipsoidFit fit = john_fit(l1, 3);
    for (int k = 0; k < 500; ++k) {
      Eigen::VectorXd v(3);
      v << r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1);
      const double ratio = (fit.m * v).norm() / l1(v);
      CHECK(ratio >= 1.0 - 1e-6);
      CHECK(ratio <= std::sqrt(3.0) * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("reducing operators") {
  const Grid g = line(64);
  SUBCASE("d = 1 is exact") {
    const ScalarField x = ScalarField::from_function(g, [](const Point& p) { return p[0]; });
    const ReducingOperator op = reducing_operator(as_matrix_weight(x), ExponentFunction::constant(g, 2.0), whole_box(g));
    CHECK(op.m(0, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-3));
    CHECK(op.certificate.min_ratio == doctest::Approx(1.0));
    CHECK(op.certificate.max_ratio == doctest::Approx(1.0));
  }
  SUBCASE("scaled identity") {
    MatrixField w = MatrixField::identity(g, 2);
    for (double& v : w.values) v *= 2.5;
    const ReducingOperator op = reducing_operator(w, ExponentFunction::constant(g, 3.0), whole_box(g));
    CHECK((op.m - std::sqrt(2.0) * 2.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-6);
    const ReducingOperator dual = dual_reducing_operator(MatrixField::identity(g, 2), ExponentFunction::constant(g, 2.0),
                                                         whole_box(g));
    CHECK((dual.m - std::sqrt(2.0) * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-6);
  }
  SUBCASE("sandwich on a rotating weight") {
    const MatrixField w = make_rotating_weight(g, [](const Point& x) { return 2.0 * x[0]; }, 0.6, -0.4);
    const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 1.4 + 2.0 * x[0]; });
    for (const Cube& q : dyadic_levels(g, 0, 2).cubes) {
      const ReducingOperator op = reducing_operator(w, p, q);
      CHECK(op.certificate.min_ratio >= 1.0 - 1e-9);
      CHECK(op.certificate.max_ratio <= std::sqrt(2.0) + 1e-6);
    }
  }
}
