#pragma once

#include <optional>
#include <string_view>

namespace phasecode {

enum class CapacityRegime { BothCoherent, OneSqueezed, BothSqueezed };

std::string_view to_string(CapacityRegime regime);
CapacityRegime parse_capacity_regime(std::string_view text);

// Mean photons per bandwidth-time, summed over both input beams.
struct PhotonBudget {
  double n_bar_total = 1.0;
  CapacityRegime regime = CapacityRegime::BothCoherent;
};

struct SearchConfig {
  double split_tolerance = 1e-12;
  int max_iterations = 400;
};

struct BeamAllocation {
  double photons = 0.0;
  double alpha = 0.0;
  double v_plus = 1.0;  // measured (amplitude) quadrature
  double v_minus = 1.0;
  double squeezing_db() const;
};

struct CapacityResult {
  bool resolvable = false; // false: budget too small for even one resolvable phase level
  double log2_levels = 0.0;
  double delta_theta_min = 0.0;
  double split = 0.5; // fraction of the budget given to beam 1 (the signal beam)
  BeamAllocation beam1;
  BeamAllocation beam2;
  // (log2 L - log2 L_coherent) / log2 L_coherent; empty when the coherent
  // baseline is itself below threshold.
  std::optional<double> improvement_vs_coherent;
};

// n = (alpha^2 + V+ + V- - 2) / 4.
double photons_of_state(double alpha, double v_plus, double v_minus);

// Best single-beam state for a photon allocation: minimises V+/alpha^2 over
// pure states (V- = 1/V+) when squeezing is allowed; coherent otherwise.
BeamAllocation best_beam_state(double photons, bool squeezed);

// Maximises log2 L_max over the split of the budget between the beams.
CapacityResult optimize_capacity(const PhotonBudget &budget, const SearchConfig &config = {});

struct SqueezingRequirement {
  double beam1_db = 0.0;
  double beam2_db = 0.0;
};

// 10 log10 V+ of each beam at the optimum; nullopt below threshold.
std::optional<SqueezingRequirement> required_squeezing(const PhotonBudget &budget, const SearchConfig &config = {});

} // namespace phasecode
