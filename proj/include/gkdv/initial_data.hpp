#pragma once

// Initial data families. Each returns the field sampled on the grid; the
// analyticity radius of the underlying function on the line is noted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

/// A sech(x / w): poles at x = i pi w / 2, radius pi w / 2.
inline SpectralField sech_data(const GridSpec& grid, double amplitude = 1.0, double width = 1.0, double x0 = 0.0) {
  if (!(width > 0.0)) throw ConfigurationError("sech width must be positive");
  std::vector<double> u(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) u[n] = amplitude / std::cosh((grid.x(n) - x0) / width);
  return forward_transform(u, grid);
}

/// A exp(-x^2 / w^2): entire.
inline SpectralField gaussian_data(const GridSpec& grid, double amplitude = 1.0, double width = 1.0,
                                   double x0 = 0.0) {
  if (!(width > 0.0)) throw ConfigurationError("gaussian width must be positive");
  std::vector<double> u(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double y = (grid.x(n) - x0) / width;
    u[n] = amplitude * std::exp(-y * y);
  }
  return forward_transform(u, grid);
}

/// Sum of four sech bumps with random signs, weights and centers in
/// [-L/8, L/8], rescaled so that max|u| = amplitude. The first bump has
/// radius exactly `decay`; the others are up to 1.5 times wider, so the
/// sum has radius `decay`.
inline SpectralField random_analytic_data(const GridSpec& grid, std::uint64_t seed, double amplitude = 0.1,
                                          double decay = 1.5) {
  if (!(decay > 0.0)) throw ConfigurationError("random-analytic decay must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double base_width = 2.0 * decay / std::numbers::pi;
  const double span = grid.half_length() / 8.0;

  std::vector<double> u(grid.size(), 0.0);
  for (int b = 0; b < 4; ++b) {
    const double width = b == 0 ? base_width : base_width * (1.0 + 0.5 * unit(rng));
    const double center = span * (2.0 * unit(rng) - 1.0);
    const double weight = (0.5 + 0.5 * unit(rng)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    for (std::size_t n = 0; n < grid.size(); ++n) u[n] += weight / std::cosh((grid.x(n) - center) / width);
  }
  double peak = 0.0;
  for (double v : u) peak = std::max(peak, std::abs(v));
  for (double& v : u) v *= amplitude / peak;
  return forward_transform(u, grid);
}

}  // namespace gkdv
