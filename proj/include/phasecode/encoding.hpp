#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "phasecode/modes.hpp"

namespace phasecode {

// The four split-detector compatible phase-front transforms of u0.
enum class Transform : std::uint8_t { PlusU0 = 0, MinusU0 = 1, PlusUf0 = 2, MinusUf0 = 3 };

constexpr bool is_flipped(Transform t) { return t == Transform::PlusUf0 || t == Transform::MinusUf0; }
constexpr double transform_sign(Transform t) {
  return (t == Transform::MinusU0 || t == Transform::MinusUf0) ? -1.0 : 1.0;
}
constexpr Transform make_transform(bool flipped, bool negative) {
  return static_cast<Transform>((flipped ? 2 : 0) + (negative ? 1 : 0));
}

std::string_view to_string(Transform t);
Transform parse_transform(std::string_view text);

/// One stored symbol: a transverse transform plus the longitudinal phase,
/// which is only defined modulo pi.
class PhaseSymbol {
public:
  PhaseSymbol(Transform transform, double theta);

  Transform transform() const { return transform_; }
  double theta() const { return theta_; }

  bool operator==(const PhaseSymbol &) const = default;

private:
  Transform transform_;
  double theta_;
};

using ComplexProfile = std::vector<std::complex<double>>;

// e^{i theta} (+-u0 or +-uf0) on the mode's grid. `mode` must be TEM00.
ComplexProfile apply_transform(const TransverseMode &mode, const PhaseSymbol &symbol);

// Pit geometry. A flat pit reflects +-u0; a half-step pit (one half
// recessed by an extra quarter wave) reflects +-uf0. Orientation picks the
// overall sign.
enum class PitShape : std::uint8_t { Flat, HalfStep };
enum class Orientation : std::uint8_t { Positive, Negative };

struct PitSpec {
  double depth = 0.0;         // in units of the wavelength, in [0, 1/2]
  PitShape shape = PitShape::Flat;
  Orientation orientation = Orientation::Positive;

  bool operator==(const PitSpec &) const = default;
};

// theta = (4 pi depth) mod pi, transform from shape and orientation.
PhaseSymbol pit_to_symbol(const PitSpec &pit);

// Shallowest pit producing `symbol` (depth in [0, 1/4)).
PitSpec symbol_to_pit(const PhaseSymbol &symbol);

// floor(theta * levels / pi), clamped to [0, levels - 1].
std::size_t quantize_theta(double theta, std::size_t levels_per_theta);

/// Symbol alphabet: four transforms times a uniform theta grid whose levels
/// sit at the centre of each quantisation cell.
class LevelCode {
public:
  explicit LevelCode(std::size_t levels_per_theta);

  std::size_t levels_per_theta() const { return levels_; }
  std::size_t total_levels() const { return 4 * levels_; }
  // Requires levels_per_theta to be a power of two.
  unsigned bits_per_pit() const;

  double level_theta(std::size_t level) const;

  // Index layout: transform * levels_per_theta + level.
  PhaseSymbol symbol_at(std::size_t index) const;
  std::size_t index_of(const PhaseSymbol &symbol) const;

  bool operator==(const LevelCode &) const = default;

private:
  std::size_t levels_;
};

struct Track {
  double wavelength = 1e-6; // metres
  LevelCode code{1};
  std::size_t pad_bits = 0; // zero bits appended to fill the final pit
  std::vector<PitSpec> pits;
};

// Packs bits_per_pit bits per pit, most significant bit first, in pit order.
// A short final group is zero-padded and the pad count stored in the track.
Track bits_to_track(std::span<const std::uint8_t> bits, const LevelCode &code, double wavelength);

// Inverse of bits_to_track; strips the recorded padding.
std::vector<std::uint8_t> track_to_bits(const Track &track);

// Bits carried by one symbol index (MSB first), for bit-error accounting.
std::vector<std::uint8_t> index_to_bits(std::size_t index, unsigned bits_per_pit);

// Line-oriented text format:
//   # phasecode track v1
//   wavelength_m <double>
//   levels_per_theta <int>
//   pit_count <int>
//   pad_bits <int>
//   depth_lambda,shape,orientation
//   <depth>,<flat|half_step>,<+|->        (one line per pit)
// Doubles use the shortest round-trip representation, so write/read/write is
// byte-identical.
void write_track(std::ostream &out, const Track &track);
Track read_track(std::istream &in);

} // namespace phasecode
