#pragma once

// Space-time fields on [-L, L) x [-T/2, T/2) and discrete X^{s,b} norms.
//
// Same normalization as SpectralField in both variables:
//
//     c(xi_j, tau_l) = dx dt / (2 pi) sum_{n,m} u(x_n, t_m) e^{-i(xi_j x_n + tau_l t_m)},
//
// so sum |c|^2 dxi dtau = sum u^2 dx dt. The free Airy flow W(t) = e^{itD^3}
// puts its support on the characteristic tau = xi^3.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/fft.hpp"
#include "gkdv/gevrey.hpp"
#include "gkdv/grid.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

class SpaceTimeField {
 public:
  SpaceTimeField(GridSpec grid, std::size_t n_time, double t_extent)
      : grid_(grid), n_time_(n_time), t_extent_(t_extent), coeffs_(n_time * grid.size(), cplx{0.0, 0.0}) {
    if (n_time < 16 || (n_time & (n_time - 1)) != 0)
      throw ConfigurationError("n_time must be a power of two >= 16, got " + std::to_string(n_time));
    if (!(t_extent > 0.0) || !std::isfinite(t_extent)) throw ConfigurationError("t_extent must be positive");
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t n_time() const noexcept { return n_time_; }
  std::size_t n_space() const noexcept { return grid_.size(); }
  double t_extent() const noexcept { return t_extent_; }
  double dt() const noexcept { return t_extent_ / static_cast<double>(n_time_); }
  double dtau() const noexcept { return 2.0 * std::numbers::pi / t_extent_; }
  double t(std::size_t m) const noexcept { return -0.5 * t_extent_ + dt() * static_cast<double>(m); }
  long time_index(std::size_t m) const noexcept {
    return m < n_time_ / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n_time_);
  }
  std::size_t time_slot(long l) const noexcept {
    const long n = static_cast<long>(n_time_);
    return static_cast<std::size_t>(((l % n) + n) % n);
  }
  double frequency(std::size_t m) const noexcept { return dtau() * static_cast<double>(time_index(m)); }
  double max_frequency() const noexcept { return dtau() * static_cast<double>(n_time_ / 2); }

  /// Coefficient at time-frequency slot m, wavenumber slot i.
  cplx& at(std::size_t m, std::size_t i) noexcept { return coeffs_[m * grid_.size() + i]; }
  const cplx& at(std::size_t m, std::size_t i) const noexcept { return coeffs_[m * grid_.size() + i]; }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  std::span<cplx> coeffs() noexcept { return coeffs_; }

  bool same_shape(const SpaceTimeField& o) const noexcept {
    return grid_ == o.grid_ && n_time_ == o.n_time_ && t_extent_ == o.t_extent_;
  }

  SpaceTimeField& operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }

 private:
  GridSpec grid_;
  std::size_t n_time_;
  double t_extent_;
  std::vector<cplx> coeffs_;
};

namespace detail {

inline double st_scale(const SpaceTimeField& f) {
  return f.grid().dx() * f.dt() / (2.0 * std::numbers::pi);
}

inline double parity(long j) noexcept { return (j % 2 == 0) ? 1.0 : -1.0; }

}  // namespace detail

/// Samples u(x_n, t_m), row-major with time as the slow index.
inline SpaceTimeField spacetime_forward(std::span<const double> samples, const GridSpec& grid, std::size_t n_time,
                                        double t_extent) {
  SpaceTimeField f(grid, n_time, t_extent);
  const std::size_t nx = grid.size();
  if (samples.size() != nx * n_time)
    throw ConfigurationError("space-time sample count " + std::to_string(samples.size()) + " != " +
                             std::to_string(nx * n_time));
  std::vector<cplx> in(samples.begin(), samples.end());
  fft::forward_2d(static_cast<int>(n_time), static_cast<int>(nx), in, f.coeffs());
  const double s = detail::st_scale(f);
  for (std::size_t m = 0; m < n_time; ++m) {
    const double pm = detail::parity(f.time_index(m));
    for (std::size_t i = 0; i < nx; ++i) f.at(m, i) *= s * pm * detail::parity(grid.index(i));
  }
  return f;
}

/// Real samples; the imaginary residue is checked against the same
/// relative tolerance as the spatial inverse.
inline std::vector<double> spacetime_inverse(const SpaceTimeField& f) {
  const std::size_t nx = f.n_space(), nt = f.n_time();
  std::vector<cplx> buf(nx * nt);
  for (std::size_t m = 0; m < nt; ++m) {
    const double pm = detail::parity(f.time_index(m));
    for (std::size_t i = 0; i < nx; ++i) buf[m * nx + i] = f.at(m, i) * pm * detail::parity(f.grid().index(i));
  }
  std::vector<cplx> out(nx * nt);
  fft::backward_2d(static_cast<int>(nt), static_cast<int>(nx), buf, out);
  const double s = f.grid().dxi() * f.dtau() / (2.0 * std::numbers::pi);
  std::vector<double> u(nx * nt);
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    u[k] = out[k].real() * s;
    max_re = std::max(max_re, std::abs(u[k]));
    max_im = std::max(max_im, std::abs(out[k].imag() * s));
  }
  if (max_im > kHermitianTolerance * std::max(max_re, 1e-300))
    throw IntegrityError("space-time field is not real: imaginary residue " + std::to_string(max_im));
  return u;
}

/// Hermitian defect in the joint (xi, tau) sense, relative to max |c|.
inline double spacetime_hermitian_defect(const SpaceTimeField& f) {
  double scale = 0.0, worst = 0.0;
  for (const auto& c : f.coeffs()) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  for (std::size_t m = 0; m < f.n_time(); ++m) {
    const std::size_t mm = f.time_slot(-f.time_index(m));
    for (std::size_t i = 0; i < f.n_space(); ++i) {
      const std::size_t ii = f.grid().slot(-f.grid().index(i));
      worst = std::max(worst, std::abs(f.at(m, i) - std::conj(f.at(mm, ii))));
    }
  }
  return worst / scale;
}

/// ||e^{sigma|xi|} <xi>^s <tau - xi^3>^b c||_{L^2(dxi dtau)} with <y> = 1 + |y|.
inline double xsb_norm(const SpaceTimeField& f, double sigma, double s, double b, const GevreyParams& guard = {}) {
  if (!(sigma >= 0.0)) throw ConfigurationError("sigma must be >= 0");
  const GridSpec& g = f.grid();
  double acc = 0.0;
  for (std::size_t m = 0; m < f.n_time(); ++m) {
    const double tau = f.frequency(m);
    for (std::size_t i = 0; i < f.n_space(); ++i) {
      const cplx c = f.at(m, i);
      if (c == cplx{0.0, 0.0}) continue;
      const double xi = g.wavenumber(i);
      if (sigma * std::abs(xi) + std::log(std::abs(c)) > guard.amp_guard)
        throw AnalyticityExceeded("space-time exp weight overflow at xi = " + std::to_string(xi));
      const double w = std::exp(sigma * std::abs(xi)) * std::pow(bracket(xi), s) *
                       std::pow(bracket(tau - xi * xi * xi), b);
      acc += w * w * std::norm(c);
    }
  }
  return std::sqrt(acc * g.dxi() * f.dtau());
}

/// Plain space-time L^2 norm (Parseval).
inline double spacetime_l2(const SpaceTimeField& f) { return xsb_norm(f, 0.0, 0.0, 0.0); }

/// Band-limited product of the fields, evaluated on the common grid. The
/// result is exact (alias-free) when the sum of the factors' supports fits
/// inside the grid band; callers guarantee this through band_limited().
inline SpaceTimeField spacetime_product(std::span<const SpaceTimeField* const> factors) {
  if (factors.empty()) throw ConfigurationError("product of no fields");
  const SpaceTimeField& first = *factors[0];
  std::vector<double> acc = spacetime_inverse(first);
  for (std::size_t f = 1; f < factors.size(); ++f) {
    if (!factors[f]->same_shape(first)) throw ConfigurationError("space-time factors differ in shape");
    const auto u = spacetime_inverse(*factors[f]);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] *= u[k];
  }
  return spacetime_forward(acc, first.grid(), first.n_time(), first.t_extent());
}

/// True when every nonzero coefficient has |xi| <= max_wavenumber / p and
/// |tau| <= max_frequency / p, so that products of p such fields alias nowhere.
inline bool band_limited(const SpaceTimeField& f, int p) {
  const double kx = f.grid().max_wavenumber() / p, kt = f.max_frequency() / p;
  for (std::size_t m = 0; m < f.n_time(); ++m)
    for (std::size_t i = 0; i < f.n_space(); ++i)
      if (f.at(m, i) != cplx{0.0, 0.0} &&
          (std::abs(f.grid().wavenumber(i)) > kx || std::abs(f.frequency(m)) > kt))
        return false;
  return true;
}

/// d/dx as the multiplier i xi (odd; the Nyquist column is zeroed).
inline SpaceTimeField spacetime_dx(const SpaceTimeField& f) {
  SpaceTimeField out = f;
  const GridSpec& g = f.grid();
  for (std::size_t m = 0; m < f.n_time(); ++m)
    for (std::size_t i = 0; i < f.n_space(); ++i)
      out.at(m, i) = i == g.nyquist_index() ? cplx{0.0, 0.0} : cplx{0.0, g.wavenumber(i)} * f.at(m, i);
  return out;
}

/// Assemble a space-time field from spatial snapshots at the field's time
/// nodes, each multiplied by window[m].
inline SpaceTimeField assemble_snapshots(const std::vector<SpectralField>& snapshots, const std::vector<double>& window,
                                         std::size_t n_time, double t_extent) {
  if (snapshots.size() != n_time || window.size() != n_time)
    throw ConfigurationError("need one snapshot and one window value per time node");
  const GridSpec& g = snapshots.front().grid();
  std::vector<double> samples;
  samples.reserve(n_time * g.size());
  for (std::size_t m = 0; m < n_time; ++m) {
    if (window[m] == 0.0) {
      samples.insert(samples.end(), g.size(), 0.0);
      continue;
    }
    for (double v : inverse_transform(snapshots[m])) samples.push_back(window[m] * v);
  }
  return spacetime_forward(samples, g, n_time, t_extent);
}

}  // namespace gkdv
