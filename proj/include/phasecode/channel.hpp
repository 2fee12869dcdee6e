#pragma once

#include <cstdint>
#include <optional>

#include "phasecode/detection.hpp"
#include "phasecode/encoding.hpp"

namespace phasecode {

struct ChannelConfig {
  std::size_t phi_steps = 64; // reference-phase samples per pit, each one full window
  bool noiseless = false;
  bool integrate_on_grid = false; // grid-integrated segments instead of the closed form
  unsigned threads = 0;           // 0 = hardware concurrency; never changes the result
};

// Binomial proportion with a 95% Wilson score interval.
struct ErrorRate {
  std::uint64_t errors = 0;
  std::uint64_t total = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
};

ErrorRate wilson_interval(std::uint64_t errors, std::uint64_t total);

struct ChannelReport {
  std::uint64_t symbols = 0;     // pits read, over all passes
  std::uint64_t undecidable = 0; // excluded from the error rates
  ErrorRate ser;
  std::optional<ErrorRate> ber; // only when levels_per_theta is a power of two
  double snr_per_symbol = 0.0;  // single-window SNR at phi - theta = pi/2
};

// Reads every pit of the track `passes` times. Each read scans beam 2's phase
// over phi_steps points, adds independent Gaussian noise with the analytic
// C/D variances to each point, and decodes. Pit i of pass p draws from an
// engine seeded by (seed, p, i).
ChannelReport channel_sim(const Track &track, const BeamState &beam3, const BeamState &beam2, std::uint64_t seed,
                          std::uint64_t passes, const ChannelConfig &config = {});

} // namespace phasecode
