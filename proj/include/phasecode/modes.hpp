#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

namespace phasecode {

/// Uniform grid on [-x_max, x_max] in waist units with an even number of
/// samples, so no sample lands on the split-detector boundary at x = 0.
/// Integrals use the composite trapezoid rule; the half-line integrals
/// partition those same weights by the sign of x.
class SpatialGrid {
public:
  static constexpr double kDefaultExtent = 8.0;
  static constexpr std::size_t kDefaultPoints = 4096;

  SpatialGrid() : SpatialGrid(kDefaultExtent, kDefaultPoints) {}
  SpatialGrid(double x_max, std::size_t n_points);

  double x_min() const { return -x_max_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_points_; }
  double spacing() const { return spacing_; }

  // Exactly antisymmetric: x(i) == -x(size() - 1 - i).
  double x(std::size_t i) const;
  double weight(std::size_t i) const;

  bool operator==(const SpatialGrid &other) const = default;

private:
  double x_max_;
  std::size_t n_points_;
  double spacing_;
};

enum class Region { Full, Negative, Positive };

/// Real one-dimensional mode profile sampled on a grid. Immutable once built.
class TransverseMode {
public:
  TransverseMode(SpatialGrid grid, unsigned order, bool flipped, std::vector<double> samples);

  const SpatialGrid &grid() const { return grid_; }
  unsigned order() const { return order_; }
  bool flipped() const { return flipped_; }
  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

private:
  SpatialGrid grid_;
  unsigned order_;
  bool flipped_;
  std::vector<double> samples_;
};

// Normalised Gaussian u0(x) = (2/pi)^(1/4) w^(-1/2) exp(-x^2/w^2). Rejects
// grids narrower than +-5 waists or too coarse to hold the norm to 1e-6.
TransverseMode make_tem00(const SpatialGrid &grid, double waist = 1.0);

// Hermite-Gauss u_n with the same normalisation convention as make_tem00.
TransverseMode make_hermite_gauss(const SpatialGrid &grid, double waist, unsigned order);

// u_fn: +u_n for x > 0, -u_n for x < 0.
TransverseMode make_flipped(const TransverseMode &mode);

// Quadrature of a(x) b(x) over the region. Both modes must share a grid.
double overlap(const TransverseMode &a, const TransverseMode &b, Region region = Region::Full);

// Region integral of an arbitrary sampled function on the grid.
double integrate(const SpatialGrid &grid, std::span<const double> values, Region region = Region::Full);

void write_mode_csv(std::ostream &out, const TransverseMode &mode);

} // namespace phasecode
