#include "phasecode/capacity.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "phasecode/errors.hpp"
#include "phasecode/format.hpp"

namespace phasecode {

namespace {

constexpr double kMinBudget = 0.1;
constexpr double kMaxBudget = 1e4;

// V+ / alpha^2, the beam's contribution to 4 sin^2(delta_theta_min).
double noise_to_signal(const BeamAllocation &beam) {
  if (!(beam.alpha > 0.0)) return std::numeric_limits<double>::infinity();
  return beam.v_plus / (beam.alpha * beam.alpha);
}

struct Split {
  double fraction;
  BeamAllocation beam1;
  BeamAllocation beam2;
  double objective;
};

Split evaluate_split(double fraction, double n_bar, bool squeeze1, bool squeeze2) {
  Split s{fraction, best_beam_state(fraction * n_bar, squeeze1), best_beam_state((1.0 - fraction) * n_bar, squeeze2), 0.0};
  s.objective = noise_to_signal(s.beam1) + noise_to_signal(s.beam2);
  return s;
}

Split golden_section(double n_bar, bool squeeze1, bool squeeze2, const SearchConfig &config) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  Split f1 = evaluate_split(x1, n_bar, squeeze1, squeeze2);
  Split f2 = evaluate_split(x2, n_bar, squeeze1, squeeze2);
  for (int it = 0; it < config.max_iterations && hi - lo > config.split_tolerance; ++it) {
    if (f1.objective <= f2.objective) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = evaluate_split(x1, n_bar, squeeze1, squeeze2);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = evaluate_split(x2, n_bar, squeeze1, squeeze2);
    }
  }
  return f1.objective <= f2.objective ? f1 : f2;
}

CapacityResult optimize_unchecked(double n_bar, CapacityRegime regime, const SearchConfig &config) {
  const bool squeeze1 = regime != CapacityRegime::BothCoherent;
  const bool squeeze2 = regime == CapacityRegime::BothSqueezed;
  const Split best = golden_section(n_bar, squeeze1, squeeze2, config);

  CapacityResult result;
  result.split = best.fraction;
  result.beam1 = best.beam1;
  result.beam2 = best.beam2;
  const double argument = best.objective / 4.0;
  result.resolvable = argument <= 1.0;
  if (result.resolvable) {
    result.delta_theta_min = std::asin(std::sqrt(argument));
    result.log2_levels = std::log2(4.0 * std::numbers::pi / result.delta_theta_min);
  }
  return result;
}

} // namespace

std::string_view to_string(CapacityRegime regime) {
  switch (regime) {
  case CapacityRegime::BothCoherent: return "both_coherent";
  case CapacityRegime::OneSqueezed: return "one_squeezed";
  case CapacityRegime::BothSqueezed: return "both_squeezed";
  }
  return "?";
}

CapacityRegime parse_capacity_regime(std::string_view text) {
  for (auto r : {CapacityRegime::BothCoherent, CapacityRegime::OneSqueezed, CapacityRegime::BothSqueezed}) {
    if (text == to_string(r)) return r;
  }
  throw ValidationError("unknown regime '" + std::string(text) +
                        "' (expected both_coherent, one_squeezed or both_squeezed)");
}

double BeamAllocation::squeezing_db() const { return 10.0 * std::log10(v_plus); }

double photons_of_state(double alpha, double v_plus, double v_minus) {
  if (!(v_plus > 0.0) || !(v_minus > 0.0)) throw ValidationError("photons_of_state: variances must be > 0");
  return 0.25 * (alpha * alpha + v_plus + v_minus - 2.0);
}

BeamAllocation best_beam_state(double photons, bool squeezed) {
  BeamAllocation beam;
  beam.photons = photons;
  if (!(photons > 0.0)) return beam;
  const double k = 4.0 * photons;
  if (!squeezed) {
    beam.alpha = std::sqrt(k);
    return beam;
  }
  // With V- = 1/V+, alpha^2 = K - (1 - V)^2 / V; d/dV of V/alpha^2 vanishes at
  // V = 2 / (K + 2), leaving alpha^2 = K (K + 4) / (2 (K + 2)).
  beam.v_plus = 2.0 / (k + 2.0);
  beam.v_minus = 1.0 / beam.v_plus;
  beam.alpha = std::sqrt(k * (k + 4.0) / (2.0 * (k + 2.0)));
  return beam;
}

CapacityResult optimize_capacity(const PhotonBudget &budget, const SearchConfig &config) {
  if (!(budget.n_bar_total >= kMinBudget && budget.n_bar_total <= kMaxBudget)) {
    throw ValidationError("optimize_capacity: n_bar_total " + format_double(budget.n_bar_total) +
                          " outside [0.1, 1e4]");
  }
  CapacityResult result = optimize_unchecked(budget.n_bar_total, budget.regime, config);
  if (budget.regime == CapacityRegime::BothCoherent) {
    if (result.resolvable) result.improvement_vs_coherent = 0.0;
    return result;
  }
  const CapacityResult baseline = optimize_unchecked(budget.n_bar_total, CapacityRegime::BothCoherent, config);
  if (result.resolvable && baseline.resolvable) {
    result.improvement_vs_coherent = (result.log2_levels - baseline.log2_levels) / baseline.log2_levels;
  }
  return result;
}

std::optional<SqueezingRequirement> required_squeezing(const PhotonBudget &budget, const SearchConfig &config) {
  const CapacityResult result = optimize_capacity(budget, config);
  if (!result.resolvable) return std::nullopt;
  return SqueezingRequirement{result.beam1.squeezing_db(), result.beam2.squeezing_db()};
}

} // namespace phasecode
