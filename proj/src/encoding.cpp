#include "phasecode/encoding.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "phasecode/errors.hpp"
#include "phasecode/format.hpp"

namespace phasecode {

namespace {

constexpr double kPi = std::numbers::pi;

std::string_view to_string(PitShape shape) { return shape == PitShape::Flat ? "flat" : "half_step"; }
std::string_view to_string(Orientation o) { return o == Orientation::Positive ? "+" : "-"; }

PitShape parse_shape(std::string_view text) {
  if (text == "flat") return PitShape::Flat;
  if (text == "half_step") return PitShape::HalfStep;
  throw ValidationError("track: unknown pit shape '" + std::string(text) + "'");
}

Orientation parse_orientation(std::string_view text) {
  if (text == "+") return Orientation::Positive;
  if (text == "-") return Orientation::Negative;
  throw ValidationError("track: unknown orientation '" + std::string(text) + "'");
}

} // namespace

std::string_view to_string(Transform t) {
  switch (t) {
  case Transform::PlusU0: return "+u0";
  case Transform::MinusU0: return "-u0";
  case Transform::PlusUf0: return "+uf0";
  case Transform::MinusUf0: return "-uf0";
  }
  return "?";
}

Transform parse_transform(std::string_view text) {
  for (auto t : {Transform::PlusU0, Transform::MinusU0, Transform::PlusUf0, Transform::MinusUf0}) {
    if (text == to_string(t)) return t;
  }
  throw ValidationError("unknown transform '" + std::string(text) + "' (expected +u0, -u0, +uf0 or -uf0)");
}

PhaseSymbol::PhaseSymbol(Transform transform, double theta) : transform_(transform), theta_(theta) {
  if (!(theta >= 0.0 && theta < kPi)) {
    throw ValidationError("PhaseSymbol: theta must lie in [0, pi), got " + format_double(theta));
  }
}

ComplexProfile apply_transform(const TransverseMode &mode, const PhaseSymbol &symbol) {
  if (mode.order() != 0 || mode.flipped()) throw ValidationError("apply_transform: input must be the TEM00 profile");
  const auto &grid = mode.grid();
  const std::complex<double> factor = transform_sign(symbol.transform()) * std::polar(1.0, symbol.theta());
  const bool flip = is_flipped(symbol.transform());
  ComplexProfile field(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = (flip && grid.x(i) < 0.0) ? -mode[i] : mode[i];
    field[i] = factor * u;
  }
  return field;
}

PhaseSymbol pit_to_symbol(const PitSpec &pit) {
  if (!(pit.depth >= 0.0 && pit.depth <= 0.5)) {
    throw ValidationError("pit_to_symbol: depth " + format_double(pit.depth) + " lies outside [0, lambda/2]");
  }
  // Round trip doubles the optical path: phase 4 pi depth / lambda, in units of pi.
  const double cycles = 4.0 * pit.depth;
  double fraction = cycles - std::floor(cycles);
  if (fraction > 1.0 - 1e-12) fraction = 0.0;
  double theta = kPi * fraction;
  if (theta >= kPi) theta = 0.0;
  const bool flipped = pit.shape == PitShape::HalfStep;
  const bool negative = pit.orientation == Orientation::Negative;
  return PhaseSymbol(make_transform(flipped, negative), theta);
}

PitSpec symbol_to_pit(const PhaseSymbol &symbol) {
  PitSpec pit;
  pit.depth = symbol.theta() / (4.0 * kPi);
  pit.shape = is_flipped(symbol.transform()) ? PitShape::HalfStep : PitShape::Flat;
  pit.orientation = transform_sign(symbol.transform()) < 0 ? Orientation::Negative : Orientation::Positive;
  return pit;
}

std::size_t quantize_theta(double theta, std::size_t levels_per_theta) {
  if (levels_per_theta == 0) throw ValidationError("quantize_theta: levels_per_theta must be >= 1");
  const double scaled = std::floor(theta * static_cast<double>(levels_per_theta) / kPi);
  if (!(scaled > 0.0)) return 0;
  const auto top = static_cast<double>(levels_per_theta - 1);
  return static_cast<std::size_t>(scaled > top ? top : scaled);
}

LevelCode::LevelCode(std::size_t levels_per_theta) : levels_(levels_per_theta) {
  if (levels_per_theta == 0) throw ValidationError("LevelCode: levels_per_theta must be >= 1");
}

unsigned LevelCode::bits_per_pit() const {
  if (!std::has_single_bit(levels_)) {
    throw ValidationError("LevelCode: levels_per_theta must be a power of two for bit packing, got " +
                          std::to_string(levels_));
  }
  return static_cast<unsigned>(std::countr_zero(total_levels()));
}

double LevelCode::level_theta(std::size_t level) const {
  if (level >= levels_) throw ValidationError("LevelCode: level index out of range");
  return (static_cast<double>(level) + 0.5) * kPi / static_cast<double>(levels_);
}

PhaseSymbol LevelCode::symbol_at(std::size_t index) const {
  if (index >= total_levels()) throw ValidationError("LevelCode: symbol index out of range");
  return PhaseSymbol(static_cast<Transform>(index / levels_), level_theta(index % levels_));
}

std::size_t LevelCode::index_of(const PhaseSymbol &symbol) const {
  return static_cast<std::size_t>(symbol.transform()) * levels_ + quantize_theta(symbol.theta(), levels_);
}

Track bits_to_track(std::span<const std::uint8_t> bits, const LevelCode &code, double wavelength) {
  if (!(wavelength > 0.0)) throw ValidationError("bits_to_track: wavelength must be positive");
  const unsigned width = code.bits_per_pit();
  Track track;
  track.wavelength = wavelength;
  track.code = code;
  const std::size_t pits = (bits.size() + width - 1) / width;
  track.pad_bits = pits * width - bits.size();
  track.pits.reserve(pits);
  for (std::size_t p = 0; p < pits; ++p) {
    std::size_t index = 0;
    for (unsigned b = 0; b < width; ++b) {
      const std::size_t k = p * width + b;
      const std::uint8_t bit = k < bits.size() ? bits[k] : 0;
      if (bit > 1) throw ValidationError("bits_to_track: bit values must be 0 or 1");
      index = (index << 1) | bit;
    }
    track.pits.push_back(symbol_to_pit(code.symbol_at(index)));
  }
  return track;
}

std::vector<std::uint8_t> index_to_bits(std::size_t index, unsigned bits_per_pit) {
  std::vector<std::uint8_t> out(bits_per_pit);
  for (unsigned b = 0; b < bits_per_pit; ++b) out[b] = static_cast<std::uint8_t>((index >> (bits_per_pit - 1 - b)) & 1u);
  return out;
}

std::vector<std::uint8_t> track_to_bits(const Track &track) {
  const unsigned width = track.code.bits_per_pit();
  std::vector<std::uint8_t> bits;
  bits.reserve(track.pits.size() * width);
  for (const auto &pit : track.pits) {
    const auto chunk = index_to_bits(track.code.index_of(pit_to_symbol(pit)), width);
    bits.insert(bits.end(), chunk.begin(), chunk.end());
  }
  if (track.pad_bits > bits.size()) throw ValidationError("track: pad_bits exceeds the encoded bit count");
  bits.resize(bits.size() - track.pad_bits);
  return bits;
}

void write_track(std::ostream &out, const Track &track) {
  out << "# phasecode track v1\n";
  out << "wavelength_m " << format_double(track.wavelength) << '\n';
  out << "levels_per_theta " << track.code.levels_per_theta() << '\n';
  out << "pit_count " << track.pits.size() << '\n';
  out << "pad_bits " << track.pad_bits << '\n';
  out << "depth_lambda,shape,orientation\n";
  for (const auto &pit : track.pits) {
    out << format_double(pit.depth) << ',' << to_string(pit.shape) << ',' << to_string(pit.orientation) << '\n';
  }
}

Track read_track(std::istream &in) {
  std::string line;
  auto next_line = [&](std::string_view what) {
    if (!std::getline(in, line)) throw ValidationError("track: unexpected end of file before " + std::string(what));
    return std::string_view(line);
  };
  auto keyed = [&](std::string_view key) {
    std::string_view text = next_line(key);
    if (text.substr(0, key.size()) != key || text.size() <= key.size() + 1 || text[key.size()] != ' ') {
      throw ValidationError("track: expected '" + std::string(key) + " <value>', got '" + std::string(text) + "'");
    }
    return std::string(text.substr(key.size() + 1));
  };

  if (next_line("header") != "# phasecode track v1") throw ValidationError("track: missing '# phasecode track v1' header");
  Track track;
  track.wavelength = parse_double(keyed("wavelength_m"), "wavelength_m");
  if (!(track.wavelength > 0.0)) throw ValidationError("track: wavelength_m must be positive");
  const auto levels = parse_integer(keyed("levels_per_theta"), "levels_per_theta");
  if (levels < 1) throw ValidationError("track: levels_per_theta must be >= 1");
  track.code = LevelCode(static_cast<std::size_t>(levels));
  const auto count = parse_integer(keyed("pit_count"), "pit_count");
  const auto pad = parse_integer(keyed("pad_bits"), "pad_bits");
  if (count < 0 || pad < 0) throw ValidationError("track: negative pit_count or pad_bits");
  track.pad_bits = static_cast<std::size_t>(pad);
  if (next_line("column header") != "depth_lambda,shape,orientation") {
    throw ValidationError("track: expected column header 'depth_lambda,shape,orientation'");
  }
  track.pits.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    std::string_view text = next_line("pit record");
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw ValidationError("track: malformed pit record '" + std::string(text) + "'");
    PitSpec pit;
    pit.depth = parse_double(text.substr(0, c1), "depth_lambda");
    pit.shape = parse_shape(text.substr(c1 + 1, c2 - c1 - 1));
    pit.orientation = parse_orientation(text.substr(c2 + 1));
    pit_to_symbol(pit); // range check
    track.pits.push_back(pit);
  }
  if (std::getline(in, line) && !line.empty()) throw ValidationError("track: trailing data after declared pit_count");
  return track;
}

} // namespace phasecode
