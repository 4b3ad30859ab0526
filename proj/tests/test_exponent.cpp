#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vlw/error.hpp"
#include "vlw/exponent.hpp"

using namespace vlw;
using testing::line;

TEST_CASE("conjugate exponent") {
  const Grid g = line(8);
  CHECK(conjugate(ExponentFunction::constant(g, 2.0))[3] == doctest::Approx(2.0));
  CHECK(conjugate(ExponentFunction::constant(g, 3.0))[0] == doctest::Approx(1.5));
  const ExponentFunction one = conjugate(ExponentFunction::constant(g, 1.0));
  for (std::size_t c = 0; c < g.cell_count(); ++c) CHECK(one.is_infinite(c));
  CHECK(conjugate_value(kInfiniteExponent) == 1.0);
}

TEST_CASE("exponents below one are rejected") {
  CHECK_THROWS_AS(ExponentFunction::constant(line(4), 0.5), Error);
  CHECK_THROWS_AS(ExponentFunction(line(4), {2.0, 2.0, std::nan(""), 2.0}), Error);
}

TEST_CASE("p minus and p plus") {
  const Grid g = line(8);
  const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 2.0 + x[0]; });
  CHECK(p.p_minus() == doctest::Approx(2.0625));
  CHECK(p.p_plus() == doctest::Approx(2.9375));
  CHECK_FALSE(p.is_constant());
}

TEST_CASE("harmonic mean over a cube") {
  const Grid g = line(8);
  const Cube q = whole_box(g);
  CHECK(harmonic_mean(ExponentFunction::constant(g, 3.0), q) == doctest::Approx(3.0));
  const auto two_four = ExponentFunction::from_function(g, [](const Point& x) { return x[0] < 0.5 ? 2.0 : 4.0; });
  CHECK(harmonic_mean(two_four, q) == doctest::Approx(8.0 / 3.0));
  const auto two_inf =
      ExponentFunction::from_function(g, [](const Point& x) { return x[0] < 0.5 ? 2.0 : kInfiniteExponent; });
  CHECK(harmonic_mean(two_inf, q) == doctest::Approx(4.0));
}

TEST_CASE("log-Hoelder constants") {
  const Grid g = line(32);
  SUBCASE("constant exponent") {
    const LogHolderEstimate e = log_holder_constants(ExponentFunction::constant(g, 2.5));
    CHECK(e.c0 == 0.0);
    CHECK(e.c_inf == 0.0);
    CHECK(e.p_inf == doctest::Approx(2.5));
  }
  SUBCASE("exhaustive pair oracle") {
    const auto p = ExponentFunction::from_function(g, [](const Point& x) { return 2.0 + x[0]; });
    double best = 0.0;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      for (std::size_t j = i + 1; j < g.cell_count(); ++j) {
        const double d = std::abs(g.center(i)[0] - g.center(j)[0]);
        if (d < 0.5) best = std::max(best, -std::log(d) * std::abs(p[i] - p[j]));
      }
    }
    const LogHolderEstimate e = log_holder_constants(p);
    CHECK(e.c0 == doctest::Approx(best).epsilon(1e-12));
    CHECK_FALSE(e.sampled);
    CHECK_FALSE(e.jump_suspected);
  }
  SUBCASE("jump grows like -log h") {
    double prev = 0.0;
    for (int m : {16, 64, 256}) {
      const Grid gm = line(m);
      const auto p = ExponentFunction::from_function(gm, [](const Point& x) { return x[0] < 0.5 ? 2.0 : 3.0; });
      const LogHolderEstimate e = log_holder_constants(p);
      CHECK(e.c0 >= -std::log(gm.width(0)) * 1.0 - 1e-12);
      CHECK(e.c0 > prev);
      CHECK(e.jump_suspected);
      prev = e.c0;
    }
  }
}
