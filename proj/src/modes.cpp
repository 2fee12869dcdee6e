#include "phasecode/modes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "phasecode/errors.hpp"
#include "phasecode/format.hpp"

namespace phasecode {

namespace {

constexpr double kNormDefectLimit = 1e-6;
constexpr double kMinExtentInWaists = 5.0;

bool in_region(double x, Region region) {
  switch (region) {
  case Region::Full: return true;
  case Region::Negative: return x < 0.0;
  case Region::Positive: return x > 0.0;
  }
  return false;
}

} // namespace

SpatialGrid::SpatialGrid(double x_max, std::size_t n_points) : x_max_(x_max), n_points_(n_points) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ValidationError("SpatialGrid: x_max must be positive and finite");
  if (n_points < 2 || n_points % 2 != 0) throw ValidationError("SpatialGrid: n_points must be even and >= 2");
  spacing_ = 2.0 * x_max / static_cast<double>(n_points - 1);
}

double SpatialGrid::x(std::size_t i) const {
  // i - (n-1)/2 is a half-integer, so negation is exact and no sample hits 0.
  return (static_cast<double>(i) - 0.5 * static_cast<double>(n_points_ - 1)) * spacing_;
}

double SpatialGrid::weight(std::size_t i) const {
  return (i == 0 || i + 1 == n_points_) ? 0.5 * spacing_ : spacing_;
}

TransverseMode::TransverseMode(SpatialGrid grid, unsigned order, bool flipped, std::vector<double> samples)
    : grid_(grid), order_(order), flipped_(flipped), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size()) throw ValidationError("TransverseMode: sample count does not match grid");
}

double integrate(const SpatialGrid &grid, std::span<const double> values, Region region) {
  if (values.size() != grid.size()) throw ValidationError("integrate: value count does not match grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (in_region(grid.x(i), region)) sum += grid.weight(i) * values[i];
  }
  return sum;
}

TransverseMode make_hermite_gauss(const SpatialGrid &grid, double waist, unsigned order) {
  if (!(waist > 0.0)) throw ValidationError("make_hermite_gauss: waist must be positive");
  if (grid.x_max() < kMinExtentInWaists * waist) {
    std::ostringstream msg;
    msg << "make_hermite_gauss: grid half-width " << grid.x_max() << " is narrower than " << kMinExtentInWaists
        << " waists (waist = " << waist << ")";
    throw ValidationError(msg.str());
  }

  const double prefactor = std::pow(2.0 / std::numbers::pi, 0.25) / std::sqrt(waist);
  std::vector<double> samples(grid.size());
  std::vector<double> squared(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = std::numbers::sqrt2 * grid.x(i) / waist;
    // Normalised recurrence h_n = H_n / sqrt(2^n n!), stable for moderate n.
    double h_prev = 0.0;
    double h = 1.0;
    for (unsigned n = 0; n < order; ++n) {
      const double next = y * std::sqrt(2.0 / (n + 1.0)) * h - std::sqrt(n / (n + 1.0)) * h_prev;
      h_prev = h;
      h = next;
    }
    samples[i] = prefactor * h * std::exp(-0.5 * y * y);
    squared[i] = samples[i] * samples[i];
  }

  const double norm = integrate(grid, squared);
  if (!(std::abs(norm - 1.0) <= kNormDefectLimit)) {
    std::ostringstream msg;
    msg << "make_hermite_gauss: normalisation defect " << std::abs(norm - 1.0) << " exceeds " << kNormDefectLimit
        << " (grid too narrow or too coarse for waist " << waist << ")";
    throw ValidationError(msg.str());
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (auto &s : samples) s *= scale;
  return TransverseMode(grid, order, false, std::move(samples));
}

TransverseMode make_tem00(const SpatialGrid &grid, double waist) { return make_hermite_gauss(grid, waist, 0); }

TransverseMode make_flipped(const TransverseMode &mode) {
  if (mode.flipped()) throw ValidationError("make_flipped: mode is already flipped");
  const auto &grid = mode.grid();
  std::vector<double> samples(mode.samples().begin(), mode.samples().end());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (grid.x(i) < 0.0) samples[i] = -samples[i];
  }
  return TransverseMode(grid, mode.order(), true, std::move(samples));
}

double overlap(const TransverseMode &a, const TransverseMode &b, Region region) {
  if (!(a.grid() == b.grid())) throw ValidationError("overlap: modes are sampled on different grids");
  const auto &grid = a.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (in_region(grid.x(i), region)) sum += grid.weight(i) * a[i] * b[i];
  }
  return sum;
}

void write_mode_csv(std::ostream &out, const TransverseMode &mode) {
  CsvWriter csv(out);
  const std::string_view columns[] = {"x_waists", "amplitude_per_sqrt_waist"};
  csv.header(columns);
  for (std::size_t i = 0; i < mode.grid().size(); ++i) {
    const double row[] = {mode.grid().x(i), mode[i]};
    csv.row(row);
  }
}

} // namespace phasecode
