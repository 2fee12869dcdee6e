#pragma once

#include <numbers>
#include <optional>
#include <string_view>

#include "phasecode/detection.hpp"

namespace phasecode {

enum class NoiseRegime { Coherent, OneSqueezed, TwoSqueezed, HomodyneLimit };

std::string_view to_string(NoiseRegime regime);

// Beam 2 amplitude at or above this multiple of beam 3's counts as the
// homodyne limit when classifying a configuration.
inline constexpr double kHomodyneRatio = 1e3;

struct SnrReport {
  double snr = 0.0;             // at phi - theta = pi/2
  double delta_theta_min = 0.0; // radians
  double l_max = 0.0;           // 4 pi / delta_theta_min
  double log2_l_max = 0.0;
  NoiseRegime regime = NoiseRegime::Coherent;
};

// Signal power over noise power of the signal-carrying combination:
// 4 alpha^2 beta^2 sin^2(phi - theta) / (alpha^2 V_b(psi) + beta^2 V_a(psi)),
// psi = phi - theta + pi/2. Rejects a zero noise variance.
double snr(const BeamState &beam3, const BeamState &beam2, double phi_minus_theta);

// Smallest phase step giving SNR = 1 with the reference at quadrature,
// asin sqrt((alpha^2 V_b + beta^2 V_a) / (4 alpha^2 beta^2)). nullopt when the
// argument exceeds 1 (the configuration never reaches SNR = 1).
std::optional<double> delta_theta_min(double alpha, double beta, double var_a, double var_b);
std::optional<double> delta_theta_min(const BeamState &beam3, const BeamState &beam2);

// beta >> alpha limit: asin sqrt(V_a / (4 alpha^2)).
std::optional<double> homodyne_delta_theta_min(double alpha, double var_a);

// 4 pi / delta_theta_min; nullopt propagates an unresolvable configuration.
std::optional<double> l_max(const BeamState &beam3, const BeamState &beam2);
inline double l_max_from_delta(double delta_theta) { return 4.0 * std::numbers::pi / delta_theta; }

std::optional<SnrReport> analyze(const BeamState &beam3, const BeamState &beam2);

NoiseRegime classify(const BeamState &beam3, const BeamState &beam2);

// Photons collected in one window: P T lambda / (h c).
double photons_per_window(double power_w, double wavelength_m, double window_s);

} // namespace phasecode
