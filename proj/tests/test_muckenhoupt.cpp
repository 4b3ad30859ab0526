#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "support.hpp"
#include "vlw/error.hpp"
#include "vlw/muckenhoupt.hpp"
#include "vlw/varnorm.hpp"

using namespace vlw;
using testing::line;

namespace {

// Brute-force constant of a d x d weight: the inner y-norm evaluated from
// scratch for every x, with operator norms from a dense SVD.
double brute_matrix_constant(const MatrixField& w, const ExponentFunction& p, const Cube& q) {
  const Grid& g = w.grid;
  const auto cells = cells_in(g, q);
  const ExponentFunction pc = conjugate(p);
  ScalarField outer(g);
  for (std::size_t x : cells) {
    ScalarField inner(g);
    for (std::size_t y : cells) {
      const Eigen::MatrixXd prod = w.at(x) * w.at(y).inverse();
      inner.values[y] = Eigen::JacobiSVD<Eigen::MatrixXd>(prod).singularValues()(0);
    }
    outer.values[x] = luxemburg_norm(inner, pc, q, kernel_norm_options()).value;
  }
  return luxemburg_norm(outer, p, q, kernel_norm_options()).value / q.volume(g.dim());
}

}  // namespace

TEST_CASE("scalar constant of constant weights is one") {
  const Grid g = line(64);
  for (double c : {1.0, 0.01, 37.0}) {
    const ApReport rep = scalar_ap_constant(ScalarField(g, c), ExponentFunction::constant(g, 2.5), dyadic_levels(g, 0, 4));
    for (double v : rep.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("scalar constant of the square-root weight against a scan oracle") {
  const Grid g = line(64);
  const ScalarField w = make_power_weight(g, 0.5);
  const auto p = ExponentFunction::constant(g, 2.0);
  const CubeFamily fam = dyadic_levels(g, 0, 4);
  const ApReport rep = scalar_ap_constant(w, p, fam);
  // p = 2 closed form per cube: sqrt(mean w^2 * mean w^-2)
  double sup = 0.0;
  for (const Cube& q : fam.cubes) {
    double a = 0.0;
    double b = 0.0;
    const auto cells = cells_in(g, q);
    for (std::size_t c : cells) {
      a += w.values[c] * w.values[c];
      b += 1.0 / (w.values[c] * w.values[c]);
    }
    sup = std::max(sup, std::sqrt(a / cells.size() * b / cells.size()));
  }
  CHECK(rep.supremum == doctest::Approx(sup).epsilon(1e-5));
}

TEST_CASE("matrix constant") {
  const Grid g = line(32);
  SUBCASE("identity") {
    const ApReport rep = matrix_ap_constant(MatrixField::identity(g, 2), ExponentFunction::constant(g, 3.0), dyadic_levels(g, 0, 3));
    for (double v : rep.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("d = 1 reduces to the scalar constant") {
    testing::Rng r(41);
    for (int t = 0; t < 5; ++t) {
      const ScalarField w = testing::random_positive(g, r, 1.5);
      const auto p = ExponentFunction::from_function(g, [&](const Point& x) { return 1.3 + 2.0 * x[0]; });
      const ApReport a = scalar_ap_constant(w, p, dyadic_levels(g, 0, 3));
      const ApReport b = matrix_ap_constant(as_matrix_weight(w), p, dyadic_levels(g, 0, 3));
      for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-10));
    }
  }
  SUBCASE("diagonal weight against the brute-force oracle") {
    const double lo[1] = {1.0 / 64.0};
    const double hi[1] = {1.0 + 1.0 / 64.0};
    const Grid gs = make_uniform_grid(1, lo, hi, 32);
    const MatrixField w = MatrixField::from_function(gs, 2, [](const Point& x) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
      m(0, 0) = std::sqrt(x[0]);
      return m;
    });
    const auto p = ExponentFunction::constant(gs, 2.0);
    const CubeFamily fam = dyadic_levels(gs, 0, 3);
    const ApReport rep = matrix_ap_constant(w, p, fam);
    for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
      CHECK(rep.values[i] == doctest::Approx(brute_matrix_constant(w, p, fam.cubes[i])).epsilon(1e-9));
    }
  }
  SUBCASE("rotating weight against the brute-force oracle, variable p") {
    const MatrixField w = make_rotating_weight(g, [](const Point& x) { return 3.0 * x[0]; }, 0.5, -0.3);
    const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 1.5 + x[0]; });
    const CubeFamily fam = dyadic_levels(g, 0, 2);
    const ApReport rep = matrix_ap_constant(w, p, fam);
    for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
      CHECK(rep.values[i] == doctest::Approx(brute_matrix_constant(w, p, fam.cubes[i])).epsilon(1e-9));
    }
  }
}

TEST_CASE("reducing constant") {
  const Grid g = line(32);
  const CubeFamily fam = dyadic_levels(g, 0, 2);
  SUBCASE("d = 1 matches the scalar constant") {
    testing::Rng r(43);
    const ScalarField w = testing::random_positive(g, r, 1.0);
    const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 1.2 + 2.5 * x[0]; });
    const ApReport a = scalar_ap_constant(w, p, fam);
    const ApReport b = reducing_ap_constant(as_matrix_weight(w), p, fam);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-9));
  }
  SUBCASE("identity lies in [1, d]") {
    const ApReport rep = reducing_ap_constant(MatrixField::identity(g, 2), ExponentFunction::constant(g, 2.0), fam);
    for (double v : rep.values) {
      CHECK(v >= 1.0 - 1e-9);
      CHECK(v <= 2.0 + 1e-9);
    }
  }
  SUBCASE("rotating weight stays within a fixed factor of the direct constant") {
    const MatrixField w = make_rotating_weight(g, [](const Point& x) { return 3.0 * x[0]; }, 0.5, -0.3);
    const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 1.5 + x[0]; });
    const ApReport red = reducing_ap_constant(w, p, fam);
    const ApReport dir = matrix_ap_constant(w, p, fam);
    for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
      const double ratio = red.values[i] / dir.values[i];
      CHECK(std::isfinite(ratio));
      CHECK(ratio > 0.25);
      CHECK(ratio < 4.0);
    }
  }
}

TEST_CASE("operator-norm weight constant") {
  const Grid g = line(32);
  const CubeFamily fam = dyadic_levels(g, 0, 3);
  const auto p = ExponentFunction::constant(g, 2.0);
  for (double v : opnorm_weight_constant(MatrixField::identity(g, 2), p, fam).values) CHECK(v == doctest::Approx(1.0));
  const ScalarField w = make_power_weight(g, 0.3);
  const ApReport a = opnorm_weight_constant(as_matrix_weight(w), p, fam);
  const ApReport b = scalar_ap_constant(w, p, fam);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == doctest::Approx(b.values[i]));
  const ApReport diag = opnorm_weight_constant(make_diagonal_weight(g, {0.5, -0.3}), p, fam);
  for (double v : diag.values) CHECK(std::isfinite(v));
}

TEST_CASE("weight sums") {
  const Grid g = line(32);
  const CubeFamily fam = dyadic_levels(g, 0, 3);
  const auto p = ExponentFunction::constant(g, 2.0);
  const WeightSumReport ones = weight_sum_constant({ScalarField(g, 1.0), ScalarField(g, 1.0)}, p, fam);
  for (double v : ones.sum.values) CHECK(v == doctest::Approx(1.0));
  CHECK(ones.violations == 0);
  const WeightSumReport mixed = weight_sum_constant({make_power_weight(g, 0.5), ScalarField(g, 1.0)}, p, fam);
  CHECK(mixed.violations == 0);
  const WeightSumReport single = weight_sum_constant({make_power_weight(g, 0.5)}, p, fam);
  for (std::size_t i = 0; i < fam.cubes.size(); ++i) CHECK(single.sum.values[i] == doctest::Approx(single.components[0].values[i]));
}

TEST_CASE("weight generators") {
  const Grid g = line(16);
  for (double v : make_power_weight(g, 0.0).values) CHECK(v == 1.0);
  const MatrixField rot = make_rotating_weight(g, [](const Point&) { return 0.0; }, 0.5, -0.3);
  const MatrixField diag = make_diagonal_weight(g, {0.5, -0.3});
  for (std::size_t c = 0; c < g.cell_count(); ++c) CHECK((rot.at(c) - diag.at(c)).norm() < 1e-14);
  const double lo[1] = {-1.0};
  const double hi[1] = {1.0};
  const Grid odd = make_uniform_grid(1, lo, hi, 5);
  try {
    (void)make_power_weight(odd, -0.5);
    FAIL("expected singular_weight");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_weight);
  }
}

TEST_CASE("divergence under refinement") {
  auto sweep = [](double a) {
    std::vector<double> sups;
    for (int m : {16, 64, 256, 1024}) {
      const double lo[1] = {0.5 / m};
      const double hi[1] = {1.0 + 0.5 / m};
      const Grid g = make_uniform_grid(1, lo, hi, m);
      sups.push_back(scalar_ap_constant(make_power_weight(g, a), ExponentFunction::constant(g, 2.0),
                                        dyadic_levels(g, 0, 3)).supremum);
    }
    return sups;
  };
  const auto good = sweep(0.5);
  CHECK_FALSE(looks_divergent(good));
  CHECK(good.back() < 2.0);
  CHECK(looks_divergent(sweep(-2.0)));
}

TEST_CASE("property: invariances of the matrix constant") {
  const Grid g = line(32);
  const CubeFamily fam = dyadic_levels(g, 0, 2);
  testing::Rng r(51);
  for (int t = 0; t < 4; ++t) {
    const double rate = r.uniform(0.0, 6.0);
    const MatrixField w = make_rotating_weight(g, [&](const Point& x) { return rate * x[0]; }, r.uniform(-0.6, 0.6),
                                               r.uniform(-0.6, 0.6));
    const double a = r.uniform(1.2, 3.0);
    const auto p = ExponentFunction::from_function(g, [&](const Point& x) { return a + x[0]; });
    const ApReport base = matrix_ap_constant(w, p, fam);
    MatrixField scaled = w;
    const double c = r.uniform(0.1, 10.0);
    for (double& v : scaled.values) v *= c;
    const double th = r.uniform(0.0, 6.3);
    Eigen::MatrixXd u(2, 2);
    u << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    MatrixField conj(g, 2);
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
      const Eigen::MatrixXd m = u.transpose() * w.at(k) * u;
      conj.at(k) = 0.5 * (m + m.transpose());
    }
    const ApReport sc = matrix_ap_constant(scaled, p, fam);
    const ApReport cj = matrix_ap_constant(conj, p, fam);
    for (std::size_t i = 0; i < fam.cubes.size(); ++i) {
      CHECK(sc.values[i] == doctest::Approx(base.values[i]).epsilon(1e-9));
      CHECK(cj.values[i] == doctest::Approx(base.values[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("serial and parallel constants agree bit for bit") {
  const Grid g = line(32);
  const MatrixField w = make_rotating_weight(g, [](const Point& x) { return std::numbers::pi * x[0]; }, 0.4, -0.2);
  const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 1.5 + x[0]; });
  const CubeFamily fam = dyadic_levels(g, 0, 3, true);
  CHECK(matrix_ap_constant(w, p, fam, Execution::serial).values == matrix_ap_constant(w, p, fam, Execution::parallel).values);
  CHECK(scalar_ap_constant(op_norm(w), p, fam, Execution::serial).values ==
        scalar_ap_constant(op_norm(w), p, fam, Execution::parallel).values);
  const CubeFamily small = dyadic_levels(g, 0, 1);
  CHECK(reducing_ap_constant(w, p, small, Execution::serial).values ==
        reducing_ap_constant(w, p, small, Execution::parallel).values);
}
