#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vlw/error.hpp"
#include "vlw/muckenhoupt.hpp"
#include "vlw/sobolev.hpp"
#include "vlw/varnorm.hpp"

using namespace vlw;
using testing::line;

TEST_CASE("jacobian") {
  const Grid g = testing::square(16);
  const VectorField affine = VectorField::from_function(g, 2, [](const Point& x, std::span<double> o) {
    o[0] = 2.0 * x[0] - x[1] + 1.0;
    o[1] = 0.5 * x[1];
  });
  const JacobianField j = jacobian(affine);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(j(c, 0, 0) == doctest::Approx(2.0));
    CHECK(j(c, 0, 1) == doctest::Approx(-1.0));
    CHECK(j(c, 1, 0) == doctest::Approx(0.0));
    CHECK(j(c, 1, 1) == doctest::Approx(0.5));
  }
  VectorField c(g, 2, 3.0);
  for (double v : jacobian(c).values) CHECK(v == 0.0);

  const Grid gl = line(64);
  const ScalarField sq = ScalarField::from_function(gl, [](const Point& x) { return x[0] * x[0]; });
  const ScalarField d = partial(sq, 0);
  for (std::size_t k = 1; k + 1 < gl.cell_count(); ++k) CHECK(std::abs(d.values[k] - 2.0 * gl.center(k)[0]) < 1e-3);
  CHECK_THROWS_AS(jacobian(VectorField(line(2), 1)), Error);
}

TEST_CASE("sobolev norms") {
  const Grid g = line(64);
  const auto p2 = ExponentFunction::constant(g, 2.0);
  CHECK(sobolev_norm_matrix(VectorField(g, 2), MatrixField::identity(g, 2), p2).total == 0.0);
  const SobolevParts c = sobolev_norm_matrix(VectorField(g, 1, -3.0), MatrixField::identity(g, 1), p2);
  CHECK(c.total == doctest::Approx(3.0));
  CHECK(c.gradient == 0.0);

  SUBCASE("scalar reduction in d = n = 1") {
    const ScalarField w = make_power_weight(g, 0.5);
    const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 1.5 + x[0]; });
    const VectorField f = VectorField::from_function(g, 1, [](const Point& x, std::span<double> o) { o[0] = std::sin(3 * x[0]); });
    const SobolevParts s = sobolev_norm_matrix(f, as_matrix_weight(w), p);
    ScalarField wf(g);
    ScalarField wdf(g);
    const JacobianField df = jacobian(f);
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
      wf.values[k] = w.values[k] * std::abs(f.values[k]);
      wdf.values[k] = w.values[k] * std::abs(df(k, 0, 0));
    }
    CHECK(s.total == doctest::Approx(luxemburg_norm(wf, p).value + luxemburg_norm(wdf, p).value));
    CHECK(sobolev_norm_sum(f, as_matrix_weight(w), p).total == doctest::Approx(s.total));
  }

  SUBCASE("matrix and sum forms sandwich on affine fields") {
    const Grid g2 = testing::square(16);
    const auto p = ExponentFunction::constant(g2, 2.0);
    const VectorField f = VectorField::from_function(g2, 2, [](const Point& x, std::span<double> o) {
      o[0] = x[0] + 2.0 * x[1];
      o[1] = -x[0];
    });
    const SobolevParts m = sobolev_norm_matrix(f, MatrixField::identity(g2, 2), p);
    const SobolevParts s = sobolev_norm_sum(f, MatrixField::identity(g2, 2), p);
    // Df = [[1, 2], [-1, 0]]: operator norm and column norms in closed form
    const double op = std::sqrt((6.0 + std::sqrt(20.0)) / 2.0);
    CHECK(m.gradient == doctest::Approx(op));
    CHECK(s.gradient == doctest::Approx(std::sqrt(2.0) + 2.0));
    CHECK(m.gradient <= s.gradient);
    CHECK(s.gradient <= 2.0 * m.gradient);
  }

  SUBCASE("scalar function with an n x n weight") {
    const auto p = ExponentFunction::constant(g, 3.0);
    CHECK(sobolev_norm_scalar(ScalarField(g, 2.0), MatrixField::identity(g, 1), p).total == doctest::Approx(2.0));
    const double lo[1] = {-1.0 + 1.0 / 64};
    const double hi[1] = {1.0 + 1.0 / 64};
    const Grid gs = make_uniform_grid(1, lo, hi, 64);
    const ScalarField a = ScalarField::from_function(gs, [](const Point& x) { return std::abs(x[0]); });
    const SobolevParts s = sobolev_norm_scalar(a, MatrixField::identity(gs, 1), ExponentFunction::constant(gs, 2.0));
    CHECK(std::isfinite(s.total));
    const ScalarField d = partial(a, 0);
    CHECK(d.values[5] == doctest::Approx(-1.0));
    CHECK(d.values[60] == doctest::Approx(1.0));
  }
}

TEST_CASE("partition of unity") {
  const Grid g = line(256);
  const PartitionOfUnity pu = build_partition(g, Domain{}, 3);
  REQUIRE(pu.psi.size() == 3);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (!pu.mask[c]) continue;
    double s = 0.0;
    for (const auto& psi : pu.psi) s += psi.values[c];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    // only consecutive shells overlap
    CHECK(pu.psi[0].values[c] * pu.psi[2].values[c] == 0.0);
  }
  for (int k = 1; k <= 3; ++k) {
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      const double dist = pu.distance.values[c];
      const bool in_shell = dist > (3 - k - 1) * pu.spacing - 1e-12 && (k == 1 || dist < (3 - k + 1) * pu.spacing + 1e-12);
      if (!in_shell) CHECK(std::abs(pu.psi[static_cast<std::size_t>(k - 1)].values[c]) < 1e-12);
    }
  }
  CHECK_THROWS_AS(build_partition(line(8), Domain{}, 4), Error);

  Domain holed;
  holed.kind = Domain::Kind::box_minus_ball;
  holed.center = {0.5, 0, 0};
  holed.radius = 0.1;
  const auto mask = domain_mask(g, holed);
  CHECK(mask[128] == 0);
  CHECK(mask[10] == 1);
}

TEST_CASE("smoothing pipeline") {
  const Grid g = line(256);
  const MatrixField w = as_matrix_weight(make_power_weight(g, 0.25));
  const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 2.0 + 0.5 * x[0]; });
  SUBCASE("kink at one half") {
    const VectorField f = VectorField::from_function(g, 1, [](const Point& x, std::span<double> o) { o[0] = std::abs(x[0] - 0.5); });
    const SmoothingResult res = smooth_approximate(f, w, p, 0.05);
    CHECK(res.success);
    CHECK(res.error.total < 0.05);
    for (const ShellRow& row : res.shells) {
      CHECK(row.zero_error < row.zero_budget);
      for (double e : row.gradient_errors) CHECK(e < row.gradient_budget);
    }
    const SobolevParts measured = sobolev_norm_matrix(
        [&] {
          VectorField d(g, 1);
          for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] = f.values[k] - res.g.values[k];
          return d;
        }(),
        w, p);
    CHECK(measured.total <= 0.05);
  }
  SUBCASE("budget beyond the resolution is a named failure") {
    const VectorField f = VectorField::from_function(g, 1, [](const Point& x, std::span<double> o) { o[0] = std::abs(x[0] - 0.5); });
    SmoothingOptions opts;
    opts.min_t = 2.0 * g.width(0);
    try {
      (void)smooth_approximate(f, w, p, 0.05, opts);
      FAIL("expected resolution_limit");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::resolution_limit);
      CHECK(std::string(e.what()).find("shell") != std::string::npos);
    }
  }
  SUBCASE("large epsilon") {
    const VectorField f = VectorField::from_function(g, 1, [](const Point& x, std::span<double> o) { o[0] = x[0] * x[0]; });
    const double norm_f = sobolev_norm_matrix(f, w, p).total;
    // above ||f|| the pipeline succeeds, though the boundary shell may still halve:
    // its piece carries the steep cut-off gradient
    const SmoothingResult above = smooth_approximate(f, w, p, 2.0 * norm_f);
    CHECK(above.success);
    CHECK(above.error.total < 2.0 * norm_f);
    const SmoothingResult huge = smooth_approximate(f, w, p, 1e4);
    for (const ShellRow& row : huge.shells) CHECK(row.halvings == 0);
  }
}

TEST_CASE("smooth step") {
  CHECK(smooth_step(-0.5) == 1.0);
  CHECK(smooth_step(0.0) == 1.0);
  CHECK(smooth_step(1.0) == 0.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  for (double u = 0.01; u < 1.0; u += 0.01) {
    const double fd = (smooth_step(u + 1e-6) - smooth_step(u - 1e-6)) / 2e-6;
    CHECK(smooth_step_derivative(u) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("truncation to compact support") {
  const double lo[1] = {-8.0};
  const double hi[1] = {8.0};
  const Grid g = make_uniform_grid(1, lo, hi, 256);
  const MatrixField w = as_matrix_weight(make_power_weight(g, 0.25));
  const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 2.0 + x[0] * x[0] / (1.0 + x[0] * x[0]); });
  SUBCASE("gaussian decay") {
    const VectorField f = VectorField::from_function(g, 1, [](const Point& x, std::span<double> o) { o[0] = std::exp(-0.5 * x[0] * x[0]); });
    const TruncationResult res = truncate_to_compact(f, w, p, 0.05, 8);
    CHECK(res.monotone);
    CHECK(res.k_star >= 1);
    CHECK(res.rows[static_cast<std::size_t>(res.k_star - 1)].total < 0.05);
    for (const TruncationRow& row : res.rows) CHECK(row.scaled_grad_nu <= 2.0 + 1e-9);
  }
  SUBCASE("compact support is kept exactly") {
    const VectorField f = VectorField::from_function(g, 1, [](const Point& x, std::span<double> o) {
      o[0] = std::abs(x[0]) < 1.0 ? std::pow(1.0 - x[0] * x[0], 3) : 0.0;
    });
    const TruncationResult res = truncate_to_compact(f, w, p, 1e-12, 8);
    CHECK(res.rows[0].total < 1e-15);
    CHECK(res.g_k.values == f.values);
  }
  SUBCASE("slow decay never meets a tiny epsilon") {
    const VectorField f = VectorField::from_function(g, 1, [](const Point&, std::span<double> o) { o[0] = 1.0; });
    CHECK_THROWS_AS(truncate_to_compact(f, w, p, 1e-3, 4), Error);
  }
}
