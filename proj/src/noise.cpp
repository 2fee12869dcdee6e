#include "phasecode/noise.hpp"

#include <cmath>
#include <numbers>

#include "phasecode/errors.hpp"

namespace phasecode {

namespace {

constexpr double kPlanck = 6.62607015e-34;     // J s (exact, SI 2019)
constexpr double kLightSpeed = 299792458.0;   // m / s (exact)

// Measured quadrature when the reference sits at phi - theta = pi/2.
constexpr double kOptimalPsi = std::numbers::pi;

std::optional<double> asin_sqrt(double argument) {
  if (!(argument >= 0.0)) throw ValidationError("delta_theta_min: negative or undefined noise-to-signal ratio");
  if (argument > 1.0) return std::nullopt;
  return std::asin(std::sqrt(argument));
}

} // namespace

std::string_view to_string(NoiseRegime regime) {
  switch (regime) {
  case NoiseRegime::Coherent: return "coherent";
  case NoiseRegime::OneSqueezed: return "one_squeezed";
  case NoiseRegime::TwoSqueezed: return "two_squeezed";
  case NoiseRegime::HomodyneLimit: return "homodyne_limit";
  }
  return "?";
}

double snr(const BeamState &beam3, const BeamState &beam2, double phi_minus_theta) {
  const double alpha = beam3.amplitude();
  const double beta = beam2.amplitude();
  const double psi = phi_minus_theta + std::numbers::pi / 2.0;
  const double noise = alpha * alpha * quadrature_variance(beam2, psi) + beta * beta * quadrature_variance(beam3, psi);
  if (!(noise > 0.0)) throw ValidationError("snr: noise variance is zero (both amplitudes vanish)");
  const double s = std::sin(phi_minus_theta);
  return 4.0 * alpha * alpha * beta * beta * s * s / noise;
}

std::optional<double> delta_theta_min(double alpha, double beta, double var_a, double var_b) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ValidationError("delta_theta_min: amplitudes must be >= 0");
  if (!(var_a >= 0.0) || !(var_b >= 0.0)) throw ValidationError("delta_theta_min: variances must be >= 0");
  if (alpha == 0.0 || beta == 0.0) return std::nullopt;
  // Split per beam so the homodyne limit (beta -> inf) stays finite.
  const double argument = var_b / (4.0 * beta * beta) + var_a / (4.0 * alpha * alpha);
  return asin_sqrt(argument);
}

std::optional<double> delta_theta_min(const BeamState &beam3, const BeamState &beam2) {
  return delta_theta_min(beam3.amplitude(), beam2.amplitude(), quadrature_variance(beam3, kOptimalPsi),
                         quadrature_variance(beam2, kOptimalPsi));
}

std::optional<double> homodyne_delta_theta_min(double alpha, double var_a) {
  if (!(alpha > 0.0)) return std::nullopt;
  if (!(var_a >= 0.0)) throw ValidationError("homodyne_delta_theta_min: variance must be >= 0");
  return asin_sqrt(var_a / (4.0 * alpha * alpha));
}

std::optional<double> l_max(const BeamState &beam3, const BeamState &beam2) {
  const auto delta = delta_theta_min(beam3, beam2);
  if (!delta) return std::nullopt;
  return l_max_from_delta(*delta);
}

NoiseRegime classify(const BeamState &beam3, const BeamState &beam2) {
  if (beam3.amplitude() > 0.0 && beam2.amplitude() >= kHomodyneRatio * beam3.amplitude()) {
    return NoiseRegime::HomodyneLimit;
  }
  const int squeezed = (quadrature_variance(beam3, kOptimalPsi) < 1.0 ? 1 : 0) +
                       (quadrature_variance(beam2, kOptimalPsi) < 1.0 ? 1 : 0);
  if (squeezed == 2) return NoiseRegime::TwoSqueezed;
  if (squeezed == 1) return NoiseRegime::OneSqueezed;
  return NoiseRegime::Coherent;
}

std::optional<SnrReport> analyze(const BeamState &beam3, const BeamState &beam2) {
  const auto delta = delta_theta_min(beam3, beam2);
  if (!delta) return std::nullopt;
  SnrReport report;
  report.snr = snr(beam3, beam2, std::numbers::pi / 2.0);
  report.delta_theta_min = *delta;
  report.l_max = l_max_from_delta(*delta);
  report.log2_l_max = std::log2(report.l_max);
  report.regime = classify(beam3, beam2);
  return report;
}

double photons_per_window(double power_w, double wavelength_m, double window_s) {
  if (!(power_w >= 0.0) || !(wavelength_m > 0.0) || !(window_s > 0.0)) {
    throw ValidationError("photons_per_window: power >= 0, wavelength > 0 and window > 0 required");
  }
  return power_w * window_s * wavelength_m / (kPlanck * kLightSpeed);
}

} // namespace phasecode
