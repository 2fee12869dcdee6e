#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

namespace phasecode {

enum class Scheme { Single, ConsecutiveDifference };

struct MeasurementWindow {
  double T = 1.0;       // window length, s
  double T_prime = 0.0; // delay between the two windows (consecutive scheme), s
  double N = 1.0;       // photons per second
  Scheme scheme = Scheme::Single;
};

/// Double-sided signal and shot-noise PSDs sampled on a frequency grid.
/// `signal` and `noise` are in absolute units; `reference` is the value used
/// to normalise both for plotting (S1(0) for a single window, the T' = 0
/// consecutive peak otherwise).
struct PsdCurve {
  MeasurementWindow window;
  std::vector<double> nu;
  std::vector<double> signal;
  std::vector<double> noise;
  double reference = 1.0;
};

// Uniform grid on [0, nu_max_times_T / T] with `points` samples.
std::vector<double> frequency_grid(const MeasurementWindow &window, double nu_max_times_T = 4.0,
                                   std::size_t points = 4096);

// S1 = N^2 T sinc^2(pi T nu), N1 = N / T.
PsdCurve psd_single(const MeasurementWindow &window, std::span<const double> nu);
PsdCurve psd_single(const MeasurementWindow &window);

// S2 = N^2 kappa <(int_0^T - int_{T+T'}^{2T+T'} sin(2 pi nu t + Theta) dt)^2>_Theta,
// averaged over `phases` uniformly spaced initial phases, kappa = 2/T (the
// value that turns the same average over one window into S1). Noise is the
// white floor of a two-window difference, 2N/T.
PsdCurve psd_consecutive(const MeasurementWindow &window, std::span<const double> nu, std::size_t phases = 256);
PsdCurve psd_consecutive(const MeasurementWindow &window);

// Trigonometric reduction of the same average:
// 2 sin^2(pi nu T) sin^2(pi nu (T + T')) / (pi nu)^2, the raw eta2 before kappa.
double consecutive_gain_closed_form(double nu, double T, double T_prime);

// Root of tan x = 2x in (1, pi/2): the T' = 0 peak sits at nu T = x / pi.
double consecutive_peak_x();

// Peak of the T' = 0 consecutive signal PSD, 4 N^2 T sin^4(x)/x^2 at that root.
double consecutive_reference_peak(double N, double T);

struct NoiseFloor {
  double variance_factor = 1.0; // relative to shot noise

  static NoiseFloor shot() { return {1.0}; }
  // Variance factor 10^(dB/10); negative dB is squeezed.
  static NoiseFloor squeezed_db(double db);
};

// Band-integrated signal over band-integrated (scaled) noise on
// [nu_center - bandwidth/2, nu_center + bandwidth/2] by trapezoid with
// linear interpolation at the edges. Zero bandwidth gives the pointwise ratio.
double band_snr(const PsdCurve &curve, double nu_center, double bandwidth, NoiseFloor floor = NoiseFloor::shot());

struct PeakInfo {
  double nu_peak = 0.0;
  double value = 0.0;
  double fwhm = 0.0;
};

// Parabolic-refined maximum of the signal PSD and its full width at half
// maximum from linearly interpolated crossings. A maximum on a nu = 0 sample
// is interior by the even symmetry of a double-sided spectrum.
PeakInfo peak_and_bandwidth(const PsdCurve &curve);

// Columns nu_times_T, signal_normalized, noise_normalized.
void write_psd_csv(std::ostream &out, const PsdCurve &curve, NoiseFloor floor = NoiseFloor::shot());

} // namespace phasecode
