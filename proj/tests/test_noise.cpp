#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "phasecode/errors.hpp"
#include "phasecode/noise.hpp"

using namespace phasecode;
constexpr double kPi = std::numbers::pi;

TEST_CASE("SNR peaks at quadrature and vanishes in phase") {
  const BeamState b3(2.0), b2(3.0);
  CHECK(snr(b3, b2, kPi / 2) == doctest::Approx(4.0 * 4.0 * 9.0 / 13.0));
  CHECK(snr(b3, b2, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(snr(BeamState(0.0), BeamState(0.0), 1.0), ValidationError);
}

TEST_CASE("delta_theta_min is the SNR = 1 phase step") {
  for (double db : {0.0, -3.0, -6.0}) {
    const auto b3 = BeamState::squeezed_db(5.0, db);
    const auto b2 = BeamState::squeezed_db(4.0, db);
    const auto d = delta_theta_min(b3, b2);
    REQUIRE(d);
    // With the reference at quadrature, SNR(phi - theta) = 1 at phi - theta = d.
    const double alpha = 5.0, beta = 4.0, v = std::pow(10.0, db / 10.0);
    const double r = 4 * alpha * alpha * beta * beta * std::pow(std::sin(*d), 2) / (alpha * alpha * v + beta * beta * v);
    CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*l_max(b3, b2) == doctest::Approx(4.0 * kPi / *d));
  }
}

TEST_CASE("squeezing lowers the resolvable phase step") {
  const auto coh = *delta_theta_min(BeamState(3.0), BeamState(3.0));
  const auto one = *delta_theta_min(BeamState::squeezed_db(3.0, -3.0), BeamState(3.0));
  const auto two = *delta_theta_min(BeamState::squeezed_db(3.0, -3.0), BeamState::squeezed_db(3.0, -3.0));
  CHECK(two < one);
  CHECK(one < coh);
}

TEST_CASE("unresolvable configurations return nothing") {
  CHECK_FALSE(delta_theta_min(BeamState(0.3), BeamState(0.3)));
  CHECK_FALSE(delta_theta_min(BeamState(0.0), BeamState(3.0)));
  CHECK_FALSE(analyze(BeamState(0.1), BeamState(0.1)));
}

TEST_CASE("homodyne limit is the beta -> infinity limit of the two-beam formula") {
  const double alpha = 50.0;
  const auto h = *homodyne_delta_theta_min(alpha, 1.0);
  const auto two = *delta_theta_min(alpha, 1e9, 1.0, 1.0);
  CHECK(two == doctest::Approx(h).epsilon(1e-12));
  CHECK(classify(BeamState(1.0), BeamState(1e4)) == NoiseRegime::HomodyneLimit);
  CHECK(classify(BeamState::squeezed_db(1.0, -1.0), BeamState(1.0)) == NoiseRegime::OneSqueezed);
  CHECK(classify(BeamState(1.0), BeamState(1.0)) == NoiseRegime::Coherent);
}

TEST_CASE("photon count of a 1 mW, 1 um beam over 1 us") {
  const double n = photons_per_window(1e-3, 1e-6, 1e-6);
  CHECK(n == doctest::Approx(5.0341165675e9).epsilon(1e-9));
  const double l = l_max_from_delta(*homodyne_delta_theta_min(std::sqrt(n), 1.0));
  CHECK(std::log2(l) == doctest::Approx(20.766041868).epsilon(1e-10));
  CHECK_THROWS_AS(photons_per_window(1e-3, 0.0, 1e-6), ValidationError);
}

TEST_CASE("SNR equals squared table signal over table noise") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> amp(0.2, 6.0), db(-8.0, 3.0), ang(0.05, kPi - 0.05);
  for (int k = 0; k < 100; ++k) {
    const double theta = ang(rng), dphi = ang(rng);
    const auto b3 = BeamState::squeezed_db(amp(rng), db(rng));
    const auto b2 = BeamState::squeezed_db(amp(rng), db(rng), theta + dphi);
    const auto t = oracle::table1(k % 4, b3.amplitude(), b2.amplitude(), theta, b2.phase());
    const double signal = k % 4 >= 2 ? t.c : t.d;
    const double var = oracle::table2(b3.amplitude(), b2.amplitude(), b3.var_plus(), b3.var_minus(), b2.var_plus(),
                                      b2.var_minus(), dphi);
    CHECK(snr(b3, b2, dphi) == doctest::Approx(signal * signal / var).epsilon(1e-9));
  }
}

TEST_CASE("less measured-quadrature noise never lowers the SNR") {
  double previous = 0.0;
  for (double db = 3.0; db >= -12.0; db -= 0.5) {
    const double s = snr(BeamState::squeezed_db(2.0, db), BeamState(3.0), kPi / 2);
    CHECK(s > previous);
    previous = s;
  }
}

TEST_CASE("homodyne SNR limit at beta = 1000 alpha") {
  const double alpha = 2.0;
  for (double db : {0.0, -3.0}) {
    const auto b3 = BeamState::squeezed_db(alpha, db);
    const double limit = 4.0 * alpha * alpha / b3.var_plus();
    CHECK(snr(b3, BeamState(1e3 * alpha), kPi / 2) == doctest::Approx(limit).epsilon(0.005));
  }
}

TEST_CASE("Monte Carlo SNR matches the analytic value") {
  const auto b3 = BeamState::squeezed_db(1.5, -3.0);
  const auto b2 = BeamState::squeezed_db(2.0, -3.0, 1.3);
  const PhaseSymbol sym(Transform::PlusU0, 0.2);
  const auto r = analytic_detection(sym, b3, b2);
  const auto stats = sample_shot_noise(r, 77, 1000000);
  const double empirical = stats.d.mean * stats.d.mean / stats.d.variance();
  CHECK(empirical == doctest::Approx(snr(b3, b2, 1.3 - 0.2)).epsilon(0.03));
}

TEST_CASE("l_max times delta_theta_min is 4 pi") {
  const auto b3 = BeamState(7.0), b2 = BeamState::squeezed_db(5.0, -2.0);
  CHECK(*l_max(b3, b2) * *delta_theta_min(b3, b2) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
}
