#include <doctest.h>

#include "support.hpp"
#include "vlw/error.hpp"
#include "vlw/grid.hpp"

using namespace vlw;
using testing::line;
using testing::square;

TEST_CASE("cell centres follow the midpoint rule") {
  const Grid g = line(4);
  CHECK(g.cell_count() == 4);
  const double want[] = {0.125, 0.375, 0.625, 0.875};
  for (std::size_t c = 0; c < 4; ++c) CHECK(g.center(c)[0] == doctest::Approx(want[c]));
}

TEST_CASE("square grid has four quarter cells") {
  const Grid g = square(2);
  CHECK(g.cell_count() == 4);
  CHECK(g.cell_volume() == doctest::Approx(0.25));
  CHECK(g.volume() == doctest::Approx(1.0));
}

TEST_CASE("degenerate box is rejected") {
  const double a[1] = {0.0};
  CHECK_THROWS_AS(make_uniform_grid(1, a, a, 4), Error);
}

TEST_CASE("linear and multi-index agree") {
  const double a[3] = {0, 0, 0};
  const double b[3] = {1, 2, 3};
  const Grid g = make_uniform_grid(3, a, b, 5);
  for (std::size_t c = 0; c < g.cell_count(); ++c) CHECK(g.linear(g.index(c)) == c);
  CHECK(g.index(1)[0] == 1);
  CHECK(g.width(2) == doctest::Approx(0.6));
}

TEST_CASE("integrate") {
  SUBCASE("unit mass") {
    CHECK(integrate(ScalarField(line(16), 1.0)).value == doctest::Approx(1.0));
  }
  SUBCASE("linear is exact") {
    const Grid g = line(4);
    CHECK(integrate(ScalarField::from_function(g, [](const Point& x) { return x[0]; })).value ==
          doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("quadratic within 1e-3") {
    const Grid g = line(64);
    const double v = integrate(ScalarField::from_function(g, [](const Point& x) { return x[0] * x[0]; })).value;
    CHECK(std::abs(v - 1.0 / 3.0) < 1e-3);
  }
  SUBCASE("empty region") {
    const Grid g = line(4);
    const IntegralResult r = integrate(ScalarField(g, 1.0), Cube{{5.0, 0, 0}, 1.0});
    CHECK(r.empty);
    CHECK(r.value == 0.0);
  }
}

TEST_CASE("dyadic cubes") {
  const Grid g = line(8);
  const CubeFamily one = dyadic_cubes(g, 1);
  REQUIRE(one.cubes.size() == 2);
  CHECK(one.cubes[0].side == doctest::Approx(0.5));
  CHECK(one.disjoint);
  CHECK(dyadic_cubes(g, 3).cubes.size() == 8);
  CHECK(max_dyadic_level(g) == 3);
  CHECK_THROWS_AS(dyadic_cubes(line(6), 2), Error);
  CHECK(dyadic_cubes(square(4), 2).cubes.size() == 16);
}

TEST_CASE("dyadic levels concatenate and are not disjoint") {
  const Grid g = line(16);
  const CubeFamily fam = dyadic_levels(g, 0, 3);
  CHECK(fam.cubes.size() == 15);
  CHECK_FALSE(fam.disjoint);
  CHECK(has_overlap(fam, 1));
  CHECK_FALSE(has_overlap(dyadic_cubes(g, 2), 1));
}

TEST_CASE("cells of a dyadic cube") {
  const Grid g = line(8);
  const auto cells = cells_in(g, dyadic_cubes(g, 1).cubes[1]);
  REQUIRE(cells.size() == 4);
  CHECK(cells.front() == 4);
  CHECK(cells.back() == 7);
}

TEST_CASE("translate tiling") {
  const Grid g = line(16);
  CHECK(translate_tiling(Cube{{-0.25, 0, 0}, 0.5}, g).cubes.size() == 3);
  CHECK(translate_tiling(Cube{{-0.5, 0, 0}, 1.0}, g).cubes.size() == 2);
  CHECK_THROWS_AS(translate_tiling(Cube{{0.0, 0, 0}, 0.5}, g), Error);
  const CubeFamily t = translate_tiling(Cube{{-0.25, 0, 0}, 0.5}, g);
  CHECK(t.disjoint);
  CHECK_FALSE(has_overlap(t, 1));
}

TEST_CASE("tripled cube keeps the centre") {
  const Cube q{{0.25, 0.5, 0}, 0.5};
  const Cube t = tripled(q, 2);
  CHECK(t.side == doctest::Approx(1.5));
  CHECK(t.center(2)[0] == doctest::Approx(q.center(2)[0]));
  CHECK(t.center(2)[1] == doctest::Approx(q.center(2)[1]));
}

TEST_CASE("property: dyadic levels tile the box") {
  testing::Rng r(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = r.integer(1, 4);
    const Grid g = r.uniform() < 0.5 ? line(1 << (k + r.integer(0, 2))) : square(1 << k);
    const int level = r.integer(0, max_dyadic_level(g));
    std::vector<int> hits(g.cell_count(), 0);
    for (const Cube& q : dyadic_cubes(g, level).cubes) {
      for (std::size_t c : cells_in(g, q)) ++hits[c];
    }
    for (int h : hits) CHECK(h == 1);
  }
}
