#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "phasecode/detection.hpp"
#include "phasecode/errors.hpp"

using namespace phasecode;
constexpr double kPi = std::numbers::pi;

namespace {

constexpr Transform kTransforms[] = {Transform::PlusU0, Transform::MinusU0, Transform::PlusUf0, Transform::MinusUf0};

double combo(const SignalTerms &t, int k) { return k == 0 ? t.a : k == 1 ? t.b : k == 2 ? t.c : t.d; }
double combo(const oracle::Combos &t, int k) { return k == 0 ? t.a : k == 1 ? t.b : k == 2 ? t.c : t.d; }

} // namespace

TEST_CASE("BeamState enforces its preconditions") {
  CHECK_THROWS_AS(BeamState(-1.0), ValidationError);
  CHECK_THROWS_AS(BeamState(1.0, 0.0, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(BeamState(1.0, 0.0, 0.5, 1.5), ValidationError);
  CHECK_NOTHROW(BeamState(1.0, 0.0, 0.5, 2.0));
  const auto s = BeamState::squeezed_db(2.0, -3.0);
  CHECK(s.var_plus() == doctest::Approx(std::pow(10.0, -0.3)));
  CHECK(s.var_plus() * s.var_minus() == doctest::Approx(1.0));
}

TEST_CASE("grid-integrated read-out reproduces the photocurrent table") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(0.1, 5.0), phase(0.0, kPi), phi(0.0, 2 * kPi);
  const SpatialGrid grid;
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = amp(rng), beta = amp(rng), theta = phase(rng), p = phi(rng);
    for (int t = 0; t < 4; ++t) {
      const PhaseSymbol sym(kTransforms[t], theta);
      const auto sim = simulate_detection(sym, BeamState(alpha), BeamState(beta, p), grid);
      const auto ref = oracle::table1(t, alpha, beta, theta, p);
      const double scale = alpha * alpha + beta * beta;
      for (int k = 0; k < 4; ++k) CHECK(std::abs(combo(sim.combos, k) - combo(ref, k)) <= 1e-9 * scale);
      const auto closed = analytic_detection(sym, BeamState(alpha), BeamState(beta, p));
      for (int s = 0; s < 4; ++s) CHECK(std::abs(sim.segments[s] - closed.segments[s]) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("segment photon numbers conserve energy") {
  const auto r = analytic_detection(PhaseSymbol(Transform::PlusUf0, 1.0), BeamState(2.0), BeamState(3.0, 0.4));
  CHECK(r.segments[0] + r.segments[1] + r.segments[2] + r.segments[3] == doctest::Approx(13.0));
  for (double d : r.segments) CHECK(d >= 0.0);
}

TEST_CASE("noise variance follows the quadrature form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(0.5, 4.0), db(-10.0, 10.0), ang(0.0, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const auto b3 = BeamState::squeezed_db(amp(rng), db(rng));
    const auto b2 = BeamState::squeezed_db(amp(rng), db(rng), 2.0 * ang(rng));
    const PhaseSymbol sym(kTransforms[trial % 4], ang(rng));
    const double expected = oracle::table2(b3.amplitude(), b2.amplitude(), b3.var_plus(), b3.var_minus(),
                                           b2.var_plus(), b2.var_minus(), b2.phase() - sym.theta());
    CHECK(noise_variance(sym, b3, b2, Combination::C) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(noise_variance(sym, b3, b2, Combination::D) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(noise_variance(PhaseSymbol(Transform::PlusU0, 0), BeamState(1), BeamState(1), Combination::A),
                  ValidationError);
}

TEST_CASE("sampled variances pass a chi-square consistency check") {
  const auto r = analytic_detection(PhaseSymbol(Transform::MinusU0, 0.4), BeamState::squeezed_db(3.0, -3.0),
                                    BeamState::squeezed_db(2.0, -3.0, 1.9));
  const std::uint64_t n = 200000;
  const auto stats = sample_shot_noise(r, 99, n);
  for (auto [s, var, mean] : {std::tuple{stats.c, r.noise_var_c, r.combos.c}, {stats.d, r.noise_var_d, r.combos.d}}) {
    CHECK(s.count == n);
    // (n-1) s^2 / sigma^2 ~ chi^2(n-1): z-score of the ratio.
    const double z = (s.variance() / var - 1.0) / std::sqrt(2.0 / static_cast<double>(n - 1));
    CHECK(std::abs(z) < 4.5);
    CHECK(std::abs(s.mean - mean) < 4.5 * std::sqrt(var / static_cast<double>(n)));
  }
}

TEST_CASE("Monte Carlo output does not depend on thread count") {
  const auto r = analytic_detection(PhaseSymbol(Transform::PlusU0, 0.1), BeamState(1.0), BeamState(1.0, 0.2));
  const auto one = sample_shot_noise(r, 5, 300000, 1);
  const auto many = sample_shot_noise(r, 5, 300000, 7);
  CHECK(one.c.mean == many.c.mean);
  CHECK(one.c.m2 == many.c.m2);
  CHECK(one.d.m2 == many.d.m2);
  const auto other = sample_shot_noise(r, 6, 300000, 1);
  CHECK(other.c.m2 != one.c.m2);
}

TEST_CASE("running statistics merge equals a single pass") {
  RunningStats all, left, right;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(2.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = g(rng);
    all.push(x);
    (k < 377 ? left : right).push(x);
  }
  left.merge(right);
  CHECK(left.count == all.count);
  CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-13));
  CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("noiseless decode recovers every transform and phase") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(0.0, kPi);
  for (int trial = 0; trial < 200; ++trial) {
    const PhaseSymbol sym(kTransforms[trial % 4], trial < 8 ? 0.0 : ang(rng));
    const auto dec = decode(table_readout(sym, BeamState(1.5), BeamState(2.5)), 16);
    CHECK(dec.decided);
    CHECK(dec.symbol.transform() == sym.transform());
    const double err = std::abs(dec.symbol.theta() - sym.theta());
    CHECK(std::min(err, kPi - err) < 1e-9);
  }
}

TEST_CASE("decode reads the extremum sign and position") {
  // D reaches -2 alpha beta at phi_opt for -u0; theta sits pi/2 before it.
  const PhaseSymbol sym(Transform::MinusU0, 0.3);
  const auto dec = decode(table_readout(sym, BeamState(1.0), BeamState(1.0)), 32);
  CHECK(dec.symbol.transform() == Transform::MinusU0);
  CHECK(dec.phi_opt == doctest::Approx(0.3 + kPi / 2));
  CHECK(dec.candidates[0].amplitude == doctest::Approx(2.0));
  CHECK(dec.candidates[1].amplitude == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero signal amplitude is undecidable") {
  const auto dec = decode(table_readout(PhaseSymbol(Transform::PlusUf0, 1.0), BeamState(0.0), BeamState(3.0)), 64);
  CHECK_FALSE(dec.decided);
  CHECK(dec.confidence == 0.0);
  CHECK_THROWS_AS(decode(table_readout(PhaseSymbol(Transform::PlusU0, 0), BeamState(1), BeamState(1)), 4),
                  ValidationError);
}

TEST_CASE("phi scan csv header and row count") {
  std::ostringstream out;
  write_phi_scan_csv(out, PhaseSymbol(Transform::PlusU0, 0.5), BeamState(1.0), BeamState(1.0), SpatialGrid(8.0, 512),
                     10);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "phi_rad,combo_a,combo_b,combo_c,combo_d,noise_var_c,noise_var_d");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 10);
}

TEST_CASE("combination A vanishes and the extremum sits at phi - theta = pi/2") {
  const SpatialGrid grid(8.0, 1024);
  for (int t = 0; t < 4; ++t) {
    const PhaseSymbol sym(kTransforms[t], 0.7);
    double best = 0.0, best_phi = 0.0;
    for (int k = 0; k < 360; ++k) {
      const double phi = 2.0 * kPi * k / 360.0;
      const auto r = simulate_detection(sym, BeamState(1.2), BeamState(0.8, phi), grid);
      CHECK(std::abs(r.combos.a) < 1e-12);
      CHECK((t >= 2 ? std::abs(r.combos.d) : std::abs(r.combos.c)) < 1e-12);
      const double v = std::abs(t >= 2 ? r.combos.c : r.combos.d);
      if (v > best) {
        best = v;
        best_phi = phi;
      }
    }
    const double offset = std::fmod(best_phi - 0.7 + 2.0 * kPi, kPi);
    CHECK(offset == doctest::Approx(kPi / 2).epsilon(0.02));
  }
}
