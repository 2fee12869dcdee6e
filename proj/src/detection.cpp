#include "phasecode/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "phasecode/errors.hpp"
#include "phasecode/format.hpp"

namespace phasecode {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kChunkTrials = 65536;
// Fitted phases this close below a multiple of pi are snapped onto it so an
// exact theta = 0 is not reported as its alias theta -> pi with the sign flipped.
constexpr double kPhaseSnap = 1e-9;

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

struct SineFit {
  double amplitude = 0.0; // R >= 0
  double phase = 0.0;     // vartheta in [0, 2 pi): trace ~ R sin(phi - vartheta)
};

SineFit fit_sine(const std::vector<double> &phis, const std::vector<double> &ys) {
  double ss = 0, sc = 0, cc = 0, ys_s = 0, ys_c = 0;
  for (std::size_t k = 0; k < phis.size(); ++k) {
    const double s = std::sin(phis[k]);
    const double c = std::cos(phis[k]);
    ss += s * s;
    sc += s * c;
    cc += c * c;
    ys_s += ys[k] * s;
    ys_c += ys[k] * c;
  }
  const double det = ss * cc - sc * sc;
  const double p = (ys_s * cc - ys_c * sc) / det;
  const double q = (ys_c * ss - ys_s * sc) / det;
  SineFit fit;
  fit.amplitude = std::hypot(p, q);
  double phase = std::atan2(-q, p);
  if (phase < 0.0) phase += 2.0 * kPi;
  const double below_pi = std::fmod(phase, kPi);
  if (kPi - below_pi < kPhaseSnap) phase += kPi - below_pi;
  if (phase >= 2.0 * kPi) phase -= 2.0 * kPi;
  fit.phase = phase;
  return fit;
}

} // namespace

BeamState::BeamState(double amplitude, double phase, double var_plus, double var_minus)
    : amplitude_(amplitude), phase_(phase), var_plus_(var_plus), var_minus_(var_minus) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ValidationError("BeamState: amplitude must be >= 0");
  if (!std::isfinite(phase)) throw ValidationError("BeamState: phase must be finite");
  if (!(var_plus > 0.0) || !(var_minus > 0.0)) throw ValidationError("BeamState: quadrature variances must be > 0");
  if (var_plus * var_minus < 1.0 - 1e-9) {
    throw ValidationError("BeamState: V+ V- = " + format_double(var_plus * var_minus) +
                          " violates the uncertainty bound V+ V- >= 1");
  }
}

BeamState BeamState::squeezed_db(double amplitude, double squeezing_db, double phase) {
  const double v = std::pow(10.0, squeezing_db / 10.0);
  return BeamState(amplitude, phase, v, 1.0 / v);
}

BeamState BeamState::with_phase(double phase) const { return BeamState(amplitude_, phase, var_plus_, var_minus_); }
BeamState BeamState::with_amplitude(double amplitude) const {
  return BeamState(amplitude, phase_, var_plus_, var_minus_);
}

double quadrature_variance(const BeamState &beam, double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  return beam.var_plus() * c * c + beam.var_minus() * s * s;
}

SignalTerms combine_segments(const std::array<double, 4> &d) {
  return SignalTerms{(d[0] - d[1]) + (d[2] - d[3]), (d[0] + d[1]) + (d[2] + d[3]), (d[0] - d[1]) - (d[2] - d[3]),
                     (d[0] + d[1]) - (d[2] + d[3])};
}

SignalTerms table_signals(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2) {
  const double alpha = beam3.amplitude();
  const double beta = beam2.amplitude();
  const double interference = transform_sign(symbol.transform()) * 2.0 * alpha * beta *
                              std::sin(beam2.phase() - symbol.theta());
  SignalTerms t;
  t.a = 0.0;
  t.b = alpha * alpha + beta * beta;
  if (is_flipped(symbol.transform())) {
    t.c = interference;
    t.d = 0.0;
  } else {
    t.c = 0.0;
    t.d = interference;
  }
  return t;
}

DetectionResult analytic_detection(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2) {
  const double alpha = beam3.amplitude();
  const double beta = beam2.amplitude();
  const double cross = transform_sign(symbol.transform()) * 2.0 * alpha * beta *
                       std::sin(beam2.phase() - symbol.theta());
  // Half-line overlaps of u0 with the transformed profile.
  const double o_pos = 0.5;
  const double o_neg = is_flipped(symbol.transform()) ? -0.5 : 0.5;
  const double dc = 0.25 * (alpha * alpha + beta * beta);

  DetectionResult r;
  r.segments = {dc + 0.5 * cross * o_pos, dc + 0.5 * cross * o_neg, dc - 0.5 * cross * o_pos,
                dc - 0.5 * cross * o_neg};
  r.combos = combine_segments(r.segments);
  r.noise_var_c = noise_variance(symbol, beam3, beam2, Combination::C);
  r.noise_var_d = noise_variance(symbol, beam3, beam2, Combination::D);
  return r;
}

namespace {

DetectionResult integrate_detection(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2,
                                    const TransverseMode &u0) {
  using cd = std::complex<double>;
  const auto &grid = u0.grid();
  const ComplexProfile transformed = apply_transform(u0, symbol);
  const cd i{0.0, 1.0};
  const cd e3 = i * beam3.amplitude();
  const cd e2 = i * std::polar(beam2.amplitude(), beam2.phase());
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  std::array<double, 4> seg{};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const cd f3 = e3 * transformed[k];
    const cd f2 = e2 * u0[k];
    const cd out1 = (f2 + i * f3) * inv_sqrt2;
    const cd out2 = (i * f2 + f3) * inv_sqrt2;
    const double w = grid.weight(k);
    const bool right = grid.x(k) > 0.0;
    seg[right ? 0 : 1] += w * std::norm(out1);
    seg[right ? 2 : 3] += w * std::norm(out2);
  }

  DetectionResult r;
  r.segments = seg;
  r.combos = combine_segments(seg);
  r.noise_var_c = noise_variance(symbol, beam3, beam2, Combination::C);
  r.noise_var_d = noise_variance(symbol, beam3, beam2, Combination::D);
  return r;
}

} // namespace

DetectionResult simulate_detection(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2,
                                   const SpatialGrid &grid) {
  return integrate_detection(symbol, beam3, beam2, make_tem00(grid));
}

double noise_variance(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2,
                      Combination combination) {
  if (combination != Combination::C && combination != Combination::D) {
    throw ValidationError("noise_variance: only combinations C and D carry the phase signal");
  }
  const double psi = beam2.phase() - symbol.theta() + kPi / 2.0;
  const double alpha = beam3.amplitude();
  const double beta = beam2.amplitude();
  return beta * beta * quadrature_variance(beam3, psi) + alpha * alpha * quadrature_variance(beam2, psi);
}

void RunningStats::push(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void RunningStats::merge(const RunningStats &other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double n1 = static_cast<double>(count);
  const double n2 = static_cast<double>(other.count);
  const double delta = other.mean - mean;
  const double n = n1 + n2;
  mean += delta * n2 / n;
  m2 += other.m2 + delta * delta * n1 * n2 / n;
  count += other.count;
}

ShotNoiseStats sample_shot_noise(const DetectionResult &result, std::uint64_t seed, std::uint64_t trials,
                                 unsigned threads) {
  if (trials < 1) throw ValidationError("sample_shot_noise: trials must be >= 1");
  if (!(result.noise_var_c >= 0.0) || !(result.noise_var_d >= 0.0)) {
    throw ValidationError("sample_shot_noise: noise variances must be >= 0");
  }
  const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<ShotNoiseStats> partial(chunks);
  const double sd_c = std::sqrt(result.noise_var_c);
  const double sd_d = std::sqrt(result.noise_var_d);

  auto run_chunk = [&](std::uint64_t k) {
    auto engine = chunk_engine(seed, k);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::uint64_t begin = k * kChunkTrials;
    const std::uint64_t end = std::min(trials, begin + kChunkTrials);
    ShotNoiseStats stats;
    for (std::uint64_t t = begin; t < end; ++t) {
      stats.c.push(result.combos.c + sd_c * normal(engine));
      stats.d.push(result.combos.d + sd_d * normal(engine));
    }
    partial[k] = stats;
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  if (workers <= 1) {
    for (std::uint64_t k = 0; k < chunks; ++k) run_chunk(k);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t k = w; k < chunks; k += workers) run_chunk(k);
      });
    }
  }

  ShotNoiseStats merged;
  for (const auto &p : partial) {
    merged.c.merge(p.c);
    merged.d.merge(p.d);
  }
  return merged;
}

Readout table_readout(const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2) {
  return [=](double phi) { return analytic_detection(symbol, beam3, beam2.with_phase(phi)); };
}

DecodeResult decode(const Readout &readout, std::size_t phi_steps) {
  if (phi_steps < 8) throw ValidationError("decode: phi_steps must be >= 8");
  std::vector<double> phis(phi_steps), c_trace(phi_steps), d_trace(phi_steps), var_c(phi_steps), var_d(phi_steps);
  for (std::size_t k = 0; k < phi_steps; ++k) {
    phis[k] = kPi * static_cast<double>(k) / static_cast<double>(phi_steps);
    const DetectionResult r = readout(phis[k]);
    c_trace[k] = r.combos.c;
    d_trace[k] = r.combos.d;
    var_c[k] = r.noise_var_c;
    var_d[k] = r.noise_var_d;
  }

  auto candidate_from = [&](const SineFit &fit, bool flipped, const std::vector<double> &vars) {
    SymbolCandidate cand;
    const bool negative = fit.phase >= kPi;
    cand.theta = negative ? fit.phase - kPi : fit.phase;
    if (!(cand.theta < kPi)) cand.theta = 0.0;
    cand.transform = make_transform(flipped, negative);
    cand.amplitude = fit.amplitude;
    const double phi_opt = cand.theta < kPi / 2.0 ? cand.theta + kPi / 2.0 : cand.theta - kPi / 2.0;
    const auto nearest = std::min<std::size_t>(
        phi_steps - 1, static_cast<std::size_t>(std::lround(phi_opt / kPi * static_cast<double>(phi_steps))));
    const double sd = std::sqrt(std::max(0.0, vars[nearest]));
    if (sd > 0.0) cand.confidence = fit.amplitude / sd;
    else cand.confidence = fit.amplitude > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return cand;
  };

  DecodeResult out;
  out.candidates[0] = candidate_from(fit_sine(phis, d_trace), false, var_d);
  out.candidates[1] = candidate_from(fit_sine(phis, c_trace), true, var_c);

  const auto &best = out.candidates[1].confidence > out.candidates[0].confidence ? out.candidates[1] : out.candidates[0];
  out.confidence = best.confidence;
  out.decided = best.confidence >= 1.0;
  out.symbol = PhaseSymbol(best.transform, best.theta);
  out.phi_opt = best.theta < kPi / 2.0 ? best.theta + kPi / 2.0 : best.theta - kPi / 2.0;
  return out;
}

void write_phi_scan_csv(std::ostream &out, const PhaseSymbol &symbol, const BeamState &beam3, const BeamState &beam2,
                        const SpatialGrid &grid, std::size_t phi_steps) {
  if (phi_steps < 1) throw ValidationError("write_phi_scan_csv: phi_steps must be >= 1");
  const TransverseMode u0 = make_tem00(grid);
  CsvWriter csv(out);
  const std::string_view columns[] = {"phi_rad", "combo_a", "combo_b", "combo_c", "combo_d", "noise_var_c", "noise_var_d"};
  csv.header(columns);
  for (std::size_t k = 0; k < phi_steps; ++k) {
    const double phi = kPi * static_cast<double>(k) / static_cast<double>(phi_steps);
    const auto r = integrate_detection(symbol, beam3, beam2.with_phase(phi), u0);
    const double row[] = {phi, r.combos.a, r.combos.b, r.combos.c, r.combos.d, r.noise_var_c, r.noise_var_d};
    csv.row(row);
  }
}

} // namespace phasecode
