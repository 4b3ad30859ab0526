#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vlw/error.hpp"
#include "vlw/muckenhoupt.hpp"
#include "vlw/operators.hpp"
#include "vlw/varnorm.hpp"

using namespace vlw;
using testing::line;

TEST_CASE("cube averages") {
  const Grid g = line(16);
  const Cube q = whole_box(g);
  VectorField c(g, 2);
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    c.values[2 * k] = 3.0;
    c.values[2 * k + 1] = -1.0;
  }
  const VectorField a = average_on_cube(c, q);
  for (std::size_t k = 0; k < a.values.size(); ++k) CHECK(a.values[k] == doctest::Approx(c.values[k]));

  const VectorField x = VectorField::from_function(g, 1, [](const Point& p, std::span<double> o) { o[0] = p[0]; });
  for (double v : average_on_cube(x, q).values) CHECK(v == doctest::Approx(0.5));

  testing::Rng r(2);
  const VectorField f = testing::random_vector(g, 2, r);
  const Cube half = dyadic_cubes(g, 1).cubes[0];
  const VectorField once = average_on_cube(f, half);
  const VectorField twice = average_on_cube(once, half);
  for (std::size_t k = 0; k < once.values.size(); ++k) CHECK(twice.values[k] == doctest::Approx(once.values[k]));
  for (std::size_t k = 8; k < 16; ++k) CHECK(once.values[2 * k] == 0.0);
}

TEST_CASE("family averages") {
  const Grid g = line(16);
  const VectorField x = VectorField::from_function(g, 1, [](const Point& p, std::span<double> o) { o[0] = p[0]; });
  for (double v : average_on_family(x, dyadic_cubes(g, 0)).values) CHECK(v == doctest::Approx(0.5));
  const VectorField cells = average_on_family(x, dyadic_cubes(g, 4));
  for (std::size_t k = 0; k < x.values.size(); ++k) CHECK(cells.values[k] == doctest::Approx(x.values[k]));
  const VectorField lvl2 = average_on_family(x, dyadic_cubes(g, 2));
  for (std::size_t k = 0; k < g.cell_count(); ++k) CHECK(lvl2.values[k] == doctest::Approx(0.125 + 0.25 * (k / 4)));
  CHECK_THROWS_AS(average_on_family(x, dyadic_levels(g, 0, 1)), Error);
}

TEST_CASE("averaging bound") {
  const Grid g = line(64);
  const auto p2 = ExponentFunction::constant(g, 2.0);
  SUBCASE("identity weight contracts") {
    testing::Rng r(6);
    const VectorField f = testing::random_vector(g, 2, r);
    for (const Cube& q : dyadic_levels(g, 0, 3).cubes) {
      const AveragingCheck chk = averaging_bound_check(MatrixField::identity(g, 2), p2, f, q, 1.0);
      CHECK(chk.lhs <= chk.norm_f * (1.0 + 1e-12));
      CHECK(chk.norm_f <= chk.rhs);
    }
  }
  SUBCASE("square-root weight, 50 seeds") {
    const MatrixField w = as_matrix_weight(make_power_weight(g, 0.5));
    const CubeFamily fam = dyadic_levels(g, 0, 3);
    const double ap = matrix_ap_constant(w, p2, fam).supremum;
    for (int s = 0; s < 50; ++s) {
      testing::Rng r(1000 + s);
      const VectorField f = testing::random_vector(g, 1, r);
      for (const Cube& q : fam.cubes) CHECK(averaging_bound_check(w, p2, f, q, ap).holds);
    }
  }
  SUBCASE("support outside the cube") {
    VectorField f(g, 1);
    for (std::size_t k = 40; k < 64; ++k) f.values[k] = 1.0;
    CHECK(averaging_bound_check(MatrixField::identity(g, 1), p2, f, dyadic_cubes(g, 1).cubes[0], 1.0).lhs == 0.0);
  }
}

TEST_CASE("mollifier") {
  const Grid g = line(64);
  const DiscreteKernel k = make_mollifier(g, 0.1);
  CHECK(k.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(make_mollifier(g, 0.5 * g.width(0)), Error);
  const DiscreteKernel delta = make_mollifier(g, g.width(0));
  REQUIRE(delta.weights.size() == 1);
  testing::Rng r(19);
  const VectorField f = testing::random_vector(g, 2, r);
  CHECK(convolve(f, delta).values == f.values);

  // constants survive away from the boundary
  const ScalarField one(g, 1.0);
  const ScalarField c = convolve(one, k);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const double x = g.center(i)[0];
    if (x > 0.1 && x < 0.9) CHECK(c.values[i] == doctest::Approx(1.0));
  }
}

TEST_CASE("convolution of a step against a direct double sum") {
  const Grid g = line(64);
  const ScalarField step = ScalarField::from_function(g, [](const Point& x) { return x[0] < 0.5 ? 1.0 : 0.0; });
  const double t = 0.125;
  const ScalarField out = convolve(step, make_mollifier(g, t));
  const double h = g.width(0);
  double total = 0.0;
  for (int k = -64; k <= 64; ++k) {
    if (std::abs(k * h) < t) total += bump_profile(k * h / t);
  }
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.cell_count(); ++j) {
      const double d = (static_cast<double>(i) - static_cast<double>(j)) * h;
      if (std::abs(d) < t) acc += bump_profile(d / t) * step.values[j];
    }
    CHECK(out.values[i] == doctest::Approx(acc / total).epsilon(1e-12));
    const double x = g.center(i)[0];
    if (x > t && x < 0.5 - t) CHECK(out.values[i] == doctest::Approx(1.0));
    if (x > 0.5 + t) CHECK(out.values[i] == 0.0);
  }
}

TEST_CASE("serial and parallel convolution agree bit for bit") {
  const double lo[2] = {0, 0};
  const double hi[2] = {1, 1};
  const Grid g = make_uniform_grid(2, lo, hi, 32);
  testing::Rng r(23);
  const VectorField f = testing::random_vector(g, 2, r);
  const DiscreteKernel k = make_mollifier(g, 0.15);
  CHECK(convolve(f, k, Execution::serial).values == convolve(f, k, Execution::parallel).values);
}

TEST_CASE("tiled convolution bound") {
  const Grid g = line(64);
  const auto p = ExponentFunction::constant(g, 2.0);
  VectorField zero(g, 1);
  const Cube q{{-0.125, 0, 0}, 0.25};
  CHECK(tiled_convolution_bound(MatrixField::identity(g, 1), p, zero, q, 1.0).lhs == 0.0);
  testing::Rng r(29);
  const VectorField f = testing::random_vector(g, 1, r);
  const TiledBound id = tiled_convolution_bound(MatrixField::identity(g, 1), p, f, q, 1.0);
  CHECK(id.lhs <= id.norm_f * (1.0 + 1e-12));
  CHECK(id.covers.cubes.size() == id.tiling.cubes.size());

  const MatrixField w = as_matrix_weight(make_power_weight(g, 0.5));
  const double ap = matrix_ap_constant(w, p, dyadic_levels(g, 0, 4)).supremum;
  double envelope = 0.0;
  for (int s = 0; s < 20; ++s) {
    testing::Rng rs(300 + s);
    const VectorField fs = testing::random_vector(g, 1, rs);
    for (double side : {0.5, 0.25, 0.125}) {
      envelope = std::max(envelope, tiled_convolution_bound(w, p, fs, Cube{{-side / 2, 0, 0}, side}, ap).ratio);
    }
  }
  CHECK(std::isfinite(envelope));
  CHECK(envelope < 10.0);
}

TEST_CASE("layer cake") {
  const Grid g = line(256);
  const DiscreteKernel k = make_mollifier(g, 0.2);
  const LayerCakeMixture one = layer_cake(k, 1);
  CHECK(one.balls.size() == 1);
  const DiscreteKernel mix1 = one.mixture();
  for (std::size_t i = 0; i < k.weights.size(); ++i) CHECK(mix1.weights[i] <= k.weights[i] + 1e-15);
  CHECK(layer_cake(k, 64).sup_gap() < 0.02);
  CHECK(layer_cake(k, 64).total_weight() <= 1.0 + 1e-12);

  const MatrixField w = as_matrix_weight(make_power_weight(g, 0.5));
  testing::Rng r(37);
  const VectorField f = testing::random_vector(g, 1, r);
  const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 1.5 + x[0]; });
  for (int levels : {4, 16}) {
    const MinkowskiCheck m = layer_cake_minkowski(w, p, f, layer_cake(k, levels));
    CHECK(m.lhs <= m.rhs * (1.0 + 1e-9));
  }
}

TEST_CASE("approximate identity") {
  const double h = 1.0 / 128;
  const double lo[1] = {h / 2};
  const double hi[1] = {1.0 + h / 2};
  const Grid g = make_uniform_grid(1, lo, hi, 128);
  const MatrixField w = as_matrix_weight(make_power_weight(g, 0.25));
  const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 2.0 + 0.5 * x[0]; });
  const VectorField f = VectorField::from_function(g, 1, [](const Point& x, std::span<double> o) {
    const double s = std::sin(3.141592653589793 * x[0]);
    o[0] = s * s * (x[0] >= 0.5 ? 1.2 : 1.0);
  });
  const double ap = matrix_ap_constant(w, p, dyadic_levels(g, 0, 5)).supremum;
  const IdentityStudy st = approximate_identity_study(w, p, f, geometric_schedule(0.25, 2 * h), ap);
  CHECK(st.strictly_decreasing);
  CHECK(st.rows.back().error < 1e-2);
  const IdentityStudy serial = approximate_identity_study(w, p, f, geometric_schedule(0.25, 2 * h), ap, Execution::serial);
  CHECK(serial.c_emp == st.c_emp);

  SUBCASE("smooth field, identity weight: second order") {
    const Grid gl = line(1024);
    const VectorField s = VectorField::from_function(gl, 1, [](const Point& x, std::span<double> o) {
      o[0] = std::exp(-40.0 * (x[0] - 0.5) * (x[0] - 0.5));
    });
    const IdentityStudy sm = approximate_identity_study(MatrixField::identity(gl, 1), ExponentFunction::constant(gl, 2.0), s,
                                                        {0.08, 0.04, 0.02}, 1.0);
    const double slope = std::log(sm.rows[0].error / sm.rows[2].error) / std::log(4.0);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("geometric schedule") {
  const auto s = geometric_schedule(0.25, 0.03);
  REQUIRE(s.size() == 4);
  CHECK(s[3] == doctest::Approx(0.03125));
}
