#include "phasecode/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "phasecode/errors.hpp"
#include "phasecode/noise.hpp"

namespace phasecode {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct PitOutcome {
  bool decided = false;
  bool symbol_error = false;
  unsigned bit_errors = 0;
};

std::mt19937_64 pit_engine(std::uint64_t seed, std::uint64_t pass, std::uint64_t pit) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(pass), static_cast<std::uint32_t>(pass >> 32),
                    static_cast<std::uint32_t>(pit),  static_cast<std::uint32_t>(pit >> 32)};
  return std::mt19937_64(seq);
}

} // namespace

ErrorRate wilson_interval(std::uint64_t errors, std::uint64_t total) {
  if (errors > total) throw ValidationError("wilson_interval: errors exceed total");
  ErrorRate r;
  r.errors = errors;
  r.total = total;
  if (total == 0) return r;
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(errors) / n;
  const double z2 = kZ95 * kZ95;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  r.rate = p;
  r.ci_low = std::max(0.0, centre - half);
  r.ci_high = std::min(1.0, centre + half);
  return r;
}

ChannelReport channel_sim(const Track &track, const BeamState &beam3, const BeamState &beam2, std::uint64_t seed,
                          std::uint64_t passes, const ChannelConfig &config) {
  if (track.pits.empty()) throw ValidationError("channel_sim: track is empty");
  if (passes < 1) throw ValidationError("channel_sim: trials (read passes) must be >= 1");
  const std::size_t levels = track.code.levels_per_theta();
  if (config.phi_steps <= levels) {
    throw ValidationError("channel_sim: phi_steps (" + std::to_string(config.phi_steps) +
                          ") must exceed levels_per_theta (" + std::to_string(levels) +
                          ") so the scan resolves pi/levels_per_theta");
  }
  if (config.phi_steps < 8) throw ValidationError("channel_sim: phi_steps must be >= 8");

  const bool with_bits = std::has_single_bit(levels);
  const unsigned width = with_bits ? track.code.bits_per_pit() : 0;
  std::vector<PhaseSymbol> symbols;
  std::vector<std::size_t> indices;
  symbols.reserve(track.pits.size());
  for (const auto &pit : track.pits) {
    symbols.push_back(pit_to_symbol(pit));
    indices.push_back(track.code.index_of(symbols.back()));
  }
  const SpatialGrid grid;

  const std::uint64_t pits = track.pits.size();
  const std::uint64_t jobs = pits * passes;
  std::vector<PitOutcome> outcomes(jobs);

  auto run_job = [&](std::uint64_t job) {
    const std::uint64_t pass = job / pits;
    const std::uint64_t i = job % pits;
    const PhaseSymbol &symbol = symbols[i];
    auto engine = pit_engine(seed, pass, i);
    std::normal_distribution<double> normal(0.0, 1.0);
    Readout readout = [&](double phi) {
      const BeamState b2 = beam2.with_phase(phi);
      DetectionResult r = config.integrate_on_grid ? simulate_detection(symbol, beam3, b2, grid)
                                                   : analytic_detection(symbol, beam3, b2);
      if (!config.noiseless) {
        r.combos.c += std::sqrt(r.noise_var_c) * normal(engine);
        r.combos.d += std::sqrt(r.noise_var_d) * normal(engine);
      }
      return r;
    };
    const DecodeResult dec = decode(readout, config.phi_steps);
    PitOutcome out;
    out.decided = dec.decided;
    if (dec.decided) {
      const std::size_t got = track.code.index_of(dec.symbol);
      out.symbol_error = got != indices[i];
      if (with_bits) out.bit_errors = static_cast<unsigned>(std::popcount(got ^ indices[i]));
    }
    outcomes[job] = out;
  };

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, jobs));
  if (workers <= 1) {
    for (std::uint64_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t j = w; j < jobs; j += workers) run_job(j);
      });
    }
  }

  ChannelReport report;
  report.symbols = jobs;
  std::uint64_t decided = 0, symbol_errors = 0, bit_errors = 0;
  for (const auto &o : outcomes) {
    if (!o.decided) {
      ++report.undecidable;
      continue;
    }
    ++decided;
    symbol_errors += o.symbol_error ? 1 : 0;
    bit_errors += o.bit_errors;
  }
  report.ser = wilson_interval(symbol_errors, decided);
  if (with_bits) report.ber = wilson_interval(bit_errors, decided * width);
  const double noise = std::pow(beam3.amplitude(), 2) * beam2.var_plus() + std::pow(beam2.amplitude(), 2) * beam3.var_plus();
  report.snr_per_symbol = noise > 0.0 ? snr(beam3, beam2, std::numbers::pi / 2.0) : 0.0;
  return report;
}

} // namespace phasecode
