#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "phasecode/errors.hpp"
#include "phasecode/modes.hpp"

using namespace phasecode;

TEST_CASE("grid is antisymmetric and avoids x = 0") {
  const SpatialGrid g(6.0, 1000);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.x(i) == -g.x(g.size() - 1 - i));
    CHECK(g.x(i) != 0.0);
  }
  CHECK(g.x(0) == doctest::Approx(-6.0));
  CHECK_THROWS_AS(SpatialGrid(6.0, 999), ValidationError);
  CHECK_THROWS_AS(SpatialGrid(-1.0, 1000), ValidationError);
}

TEST_CASE("tem00 matches the closed-form Gaussian") {
  const SpatialGrid g;
  for (double w : {0.7, 1.0, 1.5}) {
    const auto u = make_tem00(g, w);
    for (std::size_t i = 0; i < g.size(); i += 97) {
      const double x = g.x(i);
      const double expected = std::pow(2.0 / std::numbers::pi, 0.25) / std::sqrt(w) * std::exp(-x * x / (w * w));
      CHECK(u[i] == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(overlap(u, u) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("half-line integrals of u0 squared are one half") {
  const auto u = make_tem00(SpatialGrid());
  CHECK(overlap(u, u, Region::Positive) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(overlap(u, u, Region::Negative) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Hermite-Gauss modes are orthonormal") {
  const SpatialGrid g;
  std::vector<TransverseMode> modes;
  for (unsigned n = 0; n < 6; ++n) modes.push_back(make_hermite_gauss(g, 1.0, n));
  for (unsigned a = 0; a < 6; ++a) {
    for (unsigned b = 0; b < 6; ++b) {
      CHECK(overlap(modes[a], modes[b]) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("flipped mode is orthogonal to its parent and keeps its norm") {
  const auto u = make_tem00(SpatialGrid());
  const auto uf = make_flipped(u);
  CHECK(uf.flipped());
  CHECK(std::abs(overlap(u, uf)) < 1e-14);
  CHECK(overlap(uf, uf) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(make_flipped(uf), ValidationError);
}

TEST_CASE("flipped u0 overlaps the odd Hermite-Gauss modes") {
  // <u1|uf0> = 2 int_0^inf u1 u0 dx = sqrt(2/pi) for unit waist. The integrand
  // has a slope at x = 0, so the split trapezoid is only second order here.
  const SpatialGrid g;
  const auto uf = make_flipped(make_tem00(g));
  const auto u1 = make_hermite_gauss(g, 1.0, 1);
  CHECK(overlap(u1, uf) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-5));
}

TEST_CASE("grid too narrow or too coarse is rejected") {
  CHECK_THROWS_AS(make_tem00(SpatialGrid(4.0, 4096)), ValidationError);
  CHECK_THROWS_AS(make_tem00(SpatialGrid(8.0, 8)), ValidationError);
  CHECK_THROWS_AS(make_tem00(SpatialGrid(), 2.0), ValidationError);
}

TEST_CASE("overlap rejects mismatched grids") {
  const auto a = make_tem00(SpatialGrid(8.0, 4096));
  const auto b = make_tem00(SpatialGrid(8.0, 2048));
  CHECK_THROWS_AS(overlap(a, b), ValidationError);
}

TEST_CASE("mode csv has one row per sample") {
  const SpatialGrid g(6.0, 64);
  std::ostringstream out;
  write_mode_csv(out, make_tem00(g));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x_waists,amplitude_per_sqrt_waist");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 64);
}
