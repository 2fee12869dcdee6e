#include "phasecode/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phasecode/errors.hpp"
#include "phasecode/format.hpp"

namespace phasecode {

namespace {

constexpr double kPi = std::numbers::pi;

void validate(const MeasurementWindow &w, Scheme expected) {
  if (w.scheme != expected) throw ValidationError("psd: window scheme does not match the requested PSD");
  if (!(w.T > 0.0) || !std::isfinite(w.T)) throw ValidationError("psd: window length T must be > 0");
  if (!(w.T_prime >= 0.0) || !std::isfinite(w.T_prime)) throw ValidationError("psd: delay T' must be >= 0");
  if (!(w.N >= 0.0) || !std::isfinite(w.N)) throw ValidationError("psd: photon rate N must be >= 0");
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// int_a^b sin(omega t + phase) dt, written with a product of sines so small
// omega does not cancel catastrophically.
double window_integral(double omega, double a, double b, double phase) {
  if (omega == 0.0) return (b - a) * std::sin(phase);
  return 2.0 * std::sin(0.5 * omega * (a + b) + phase) * std::sin(0.5 * omega * (b - a)) / omega;
}

double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const auto j = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

double band_integral(std::span<const double> xs, std::span<const double> ys, double lo, double hi) {
  double prev_x = lo;
  double prev_y = interpolate(xs, ys, lo);
  double total = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] <= lo) continue;
    if (xs[k] >= hi) break;
    total += 0.5 * (xs[k] - prev_x) * (ys[k] + prev_y);
    prev_x = xs[k];
    prev_y = ys[k];
  }
  total += 0.5 * (hi - prev_x) * (interpolate(xs, ys, hi) + prev_y);
  return total;
}

void check_grid(std::span<const double> nu) {
  if (nu.empty()) throw ValidationError("psd: frequency grid is empty");
  for (std::size_t k = 1; k < nu.size(); ++k) {
    if (!(nu[k] > nu[k - 1])) throw ValidationError("psd: frequency grid must be strictly increasing");
  }
}

} // namespace

std::vector<double> frequency_grid(const MeasurementWindow &window, double nu_max_times_T, std::size_t points) {
  if (!(window.T > 0.0)) throw ValidationError("frequency_grid: T must be > 0");
  if (!(nu_max_times_T > 0.0) || points < 2) throw ValidationError("frequency_grid: need nu_max > 0 and >= 2 points");
  std::vector<double> nu(points);
  const double step = nu_max_times_T / window.T / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) nu[k] = step * static_cast<double>(k);
  return nu;
}

PsdCurve psd_single(const MeasurementWindow &window, std::span<const double> nu) {
  validate(window, Scheme::Single);
  check_grid(nu);
  PsdCurve curve;
  curve.window = window;
  curve.nu.assign(nu.begin(), nu.end());
  curve.signal.resize(nu.size());
  curve.noise.assign(nu.size(), window.N / window.T);
  const double peak = window.N * window.N * window.T;
  for (std::size_t k = 0; k < nu.size(); ++k) {
    const double s = sinc(kPi * window.T * nu[k]);
    curve.signal[k] = peak * s * s;
  }
  curve.reference = peak > 0.0 ? peak : 1.0;
  return curve;
}

PsdCurve psd_single(const MeasurementWindow &window) { return psd_single(window, frequency_grid(window)); }

PsdCurve psd_consecutive(const MeasurementWindow &window, std::span<const double> nu, std::size_t phases) {
  validate(window, Scheme::ConsecutiveDifference);
  check_grid(nu);
  if (phases < 3) throw ValidationError("psd_consecutive: need at least 3 averaging phases");
  const double T = window.T;
  const double second_start = T + window.T_prime;
  const double second_end = 2.0 * T + window.T_prime;
  const double kappa = 2.0 / T;

  PsdCurve curve;
  curve.window = window;
  curve.nu.assign(nu.begin(), nu.end());
  curve.signal.resize(nu.size());
  curve.noise.assign(nu.size(), 2.0 * window.N / T);
  for (std::size_t k = 0; k < nu.size(); ++k) {
    const double omega = 2.0 * kPi * nu[k];
    double sum = 0.0;
    for (std::size_t j = 0; j < phases; ++j) {
      const double phase = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(phases);
      const double diff = window_integral(omega, 0.0, T, phase) - window_integral(omega, second_start, second_end, phase);
      sum += diff * diff;
    }
    curve.signal[k] = window.N * window.N * kappa * sum / static_cast<double>(phases);
  }
  const double ref = consecutive_reference_peak(window.N, T);
  curve.reference = ref > 0.0 ? ref : 1.0;
  return curve;
}

PsdCurve psd_consecutive(const MeasurementWindow &window) { return psd_consecutive(window, frequency_grid(window)); }

double consecutive_gain_closed_form(double nu, double T, double T_prime) {
  if (nu == 0.0) return 0.0;
  const double a = std::sin(kPi * nu * T);
  const double b = std::sin(kPi * nu * (T + T_prime));
  return 2.0 * a * a * b * b / (kPi * kPi * nu * nu);
}

double consecutive_peak_x() {
  // Newton on sin x - 2 x cos x, whose root in (1, pi/2) solves tan x = 2x.
  double x = 1.17;
  for (int it = 0; it < 50; ++it) {
    const double f = std::sin(x) - 2.0 * x * std::cos(x);
    const double df = -std::cos(x) + 2.0 * x * std::sin(x);
    const double step = f / df;
    x -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return x;
}

double consecutive_reference_peak(double N, double T) {
  const double x = consecutive_peak_x();
  const double s = std::sin(x);
  return 4.0 * N * N * T * s * s * s * s / (x * x);
}

NoiseFloor NoiseFloor::squeezed_db(double db) { return {std::pow(10.0, db / 10.0)}; }

double band_snr(const PsdCurve &curve, double nu_center, double bandwidth, NoiseFloor floor) {
  if (!(floor.variance_factor > 0.0)) throw ValidationError("band_snr: noise floor factor must be > 0");
  if (!(bandwidth >= 0.0)) throw ValidationError("band_snr: empty band (bandwidth must be >= 0)");
  if (curve.nu.empty()) throw ValidationError("band_snr: empty curve");
  const double lo = nu_center - 0.5 * bandwidth;
  const double hi = nu_center + 0.5 * bandwidth;
  if (lo < curve.nu.front() || hi > curve.nu.back()) {
    throw ValidationError("band_snr: band [" + format_double(lo) + ", " + format_double(hi) +
                          "] lies outside the curve's frequency range");
  }
  double signal = 0.0;
  double noise = 0.0;
  if (bandwidth == 0.0) {
    signal = interpolate(curve.nu, curve.signal, nu_center);
    noise = interpolate(curve.nu, curve.noise, nu_center);
  } else {
    signal = band_integral(curve.nu, curve.signal, lo, hi);
    noise = band_integral(curve.nu, curve.noise, lo, hi);
  }
  noise *= floor.variance_factor;
  if (!(noise > 0.0)) throw ValidationError("band_snr: zero noise power in band");
  return signal / noise;
}

PeakInfo peak_and_bandwidth(const PsdCurve &curve) {
  const auto &nu = curve.nu;
  const auto &s = curve.signal;
  if (nu.size() < 3) throw ValidationError("peak_and_bandwidth: need at least 3 samples");
  const auto i = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  const bool dc_peak = i == 0 && nu[0] == 0.0;
  if (i + 1 == s.size() || (i == 0 && !dc_peak)) throw ValidationError("peak_and_bandwidth: no interior peak");

  PeakInfo info;
  if (dc_peak) {
    info.nu_peak = 0.0;
    info.value = s[0];
  } else {
    const double x0 = nu[i - 1], x1 = nu[i], x2 = nu[i + 1];
    const double y0 = s[i - 1], y1 = s[i], y2 = s[i + 1];
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    const double xv = den != 0.0 ? x1 - 0.5 * num / den : x1;
    // Lagrange form of the same parabola, evaluated at its vertex.
    const double l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    info.nu_peak = xv;
    info.value = y0 * l0 + y1 * l1 + y2 * l2;
  }

  const double half = 0.5 * info.value;
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double t = (s[inside] - half) / (s[inside] - s[outside]);
    return nu[inside] + t * (nu[outside] - nu[inside]);
  };

  std::size_t r = i;
  while (r + 1 < s.size() && s[r + 1] >= half) ++r;
  if (r + 1 == s.size()) throw ValidationError("peak_and_bandwidth: half maximum not reached above the peak");
  const double right = crossing(r, r + 1);

  double left = 0.0;
  if (dc_peak) {
    left = -right;
  } else {
    std::size_t l = i;
    while (l > 0 && s[l - 1] >= half) --l;
    if (l == 0) throw ValidationError("peak_and_bandwidth: half maximum not reached below the peak");
    left = crossing(l, l - 1);
  }
  info.fwhm = right - left;
  return info;
}

void write_psd_csv(std::ostream &out, const PsdCurve &curve, NoiseFloor floor) {
  CsvWriter csv(out);
  const std::string_view columns[] = {"nu_times_T", "signal_normalized", "noise_normalized"};
  csv.header(columns);
  for (std::size_t k = 0; k < curve.nu.size(); ++k) {
    const double row[] = {curve.nu[k] * curve.window.T, curve.signal[k] / curve.reference,
                          curve.noise[k] * floor.variance_factor / curve.reference};
    csv.row(row);
  }
}

} // namespace phasecode
