#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>

#include "phasecode/encoding.hpp"
#include "phasecode/modes.hpp"

namespace phasecode {

/// Mean amplitude, longitudinal phase and quadrature noise of one input beam.
/// Amplitudes are in sqrt(photons per measurement window); variances are
/// shot-noise normalised (1 for a coherent state).
class BeamState {
public:
  BeamState(double amplitude, double phase = 0.0, double var_plus = 1.0, double var_minus = 1.0);

  static BeamState coherent(double amplitude, double phase = 0.0) { return BeamState(amplitude, phase); }
  // Pure state with V+ = 10^(db/10), V- = 1/V+. Negative dB squeezes the
  // amplitude quadrature.
  static BeamState squeezed_db(double amplitude, double squeezing_db, double phase = 0.0);

  double amplitude() const { return amplitude_; }
  double phase() const { return phase_; }
  double var_plus() const { return var_plus_; }
  double var_minus() const { return var_minus_; }

  BeamState with_phase(double phase) const;
  BeamState with_amplitude(double amplitude) const;

private:
  double amplitude_;
  double phase_;
  double var_plus_;
  double var_minus_;
};

// V(psi) = V+ cos^2 psi + V- sin^2 psi.
double quadrature_variance(const BeamState &beam, double psi);

enum class Combination { A, B, C, D };

struct SignalTerms {
  double a = 0.0; // (D1 - D2) + (D3 - D4)
  double b = 0.0; // (D1 + D2) + (D3 + D4)
  double c = 0.0; // (D1 - D2) - (D3 - D4)
  double d = 0.0; // (D1 + D2) - (D3 + D4)
};

// Photon numbers per window on the four split-detector segments. D1/D2 are the
// x > 0 / x < 0 halves of one beam-splitter output, D3/D4 of the other.
struct DetectionResult {
  std::array<double, 4> segments{};
  SignalTerms combos;
  double noise_var_c = 0.0;
  double noise_var_d = 0.0;
};

SignalTerms combine_segments(const std::array<double, 4> &segments);

// Closed-form photocurrent table. Beam 2's phase is phi; theta comes from
// the symbol (beam3's own phase field is not used).
SignalTerms table_signals(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2);

// Same read-out from the closed-form segment photon numbers.
DetectionResult analytic_detection(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2);

// Interferes the transformed beam 3 with beam 2 on a 50:50 beam-splitter and
// integrates |E|^2 over each detector half on the grid.
DetectionResult simulate_detection(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2,
                                   const SpatialGrid &grid = SpatialGrid());

// beta^2 V_a(psi) + alpha^2 V_b(psi) with psi = phi - theta + pi/2. C and D
// share this form under the lossless-transform assumption.
double noise_variance(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2,
                      Combination combination);

struct RunningStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x);
  void merge(const RunningStats &other);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
};

struct ShotNoiseStats {
  RunningStats c;
  RunningStats d;
};

// Adds independent zero-mean Gaussian fluctuations with the result's C and D
// noise variances to the mean signals, `trials` times. Work is split into
// fixed chunks seeded from (seed, chunk index), so output depends only on
// seed and trials, never on `threads` (0 = hardware concurrency).
ShotNoiseStats sample_shot_noise(const DetectionResult &result, std::uint64_t seed, std::uint64_t trials,
                                 unsigned threads = 0);

using Readout = std::function<DetectionResult(double phi)>;

// Noiseless read-out of a fixed symbol with beam 2's phase scanned.
Readout table_readout(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2);

struct SymbolCandidate {
  Transform transform = Transform::PlusU0;
  double theta = 0.0;
  double amplitude = 0.0;  // fitted extremum magnitude
  double confidence = 0.0; // amplitude / single-window noise std
};

struct DecodeResult {
  bool decided = false;
  PhaseSymbol symbol{Transform::PlusU0, 0.0};
  double phi_opt = 0.0;
  double confidence = 0.0;
  // [0] from combination D (unflipped), [1] from combination C (flipped).
  std::array<SymbolCandidate, 2> candidates{};
};

// Scans phi over phi_steps uniform points in [0, pi), fits each of C and D to
// a sinusoid in phi and reads the extremum: the combination carrying it picks
// flipped vs unflipped, its sign picks +-, theta = (phi_opt - pi/2) mod pi.
// Undecidable when neither extremum reaches the noise standard deviation.
DecodeResult decode(const Readout &readout, std::size_t phi_steps);

// phi-scan trace (phi, combo_a..combo_d, noise_var_c, noise_var_d) from the
// grid-integrated read-out.
void write_phi_scan_csv(std::ostream &out, const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2,
                        const SpatialGrid &grid, std::size_t phi_steps);

} // namespace phasecode
