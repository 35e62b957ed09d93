#pragma once

// Fourier-side representation of real periodic fields and the multiplier
// calculus (derivatives, Airy flow, dealiased powers) built on it.
//
// Normalization: for samples u_n = u(x_n), x_n = -L + n dx, the stored
// coefficient of wavenumber xi_j = pi j / L is
//
//     c_j = dx / sqrt(2 pi) * sum_n u_n exp(-i xi_j x_n),
//
// the trapezoid approximation of the unitary transform
// (2 pi)^{-1/2} int exp(-i x xi) u(x) dx. With dxi = pi / L this gives
// sum_j |c_j|^2 dxi = sum_n u_n^2 dx, i.e. the discrete Parseval identity
// matches the continuous one and |c_j| can be read as |u^(xi_j)| directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/fft.hpp"
#include "gkdv/grid.hpp"

namespace gkdv {

using cplx = std::complex<double>;

class SpectralField {
 public:
  explicit SpectralField(GridSpec grid) : grid_(grid), coeffs_(grid.size(), cplx{0.0, 0.0}) {}
  SpectralField(GridSpec grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size())
      throw ConfigurationError("coefficient array length " + std::to_string(coeffs_.size()) +
                               " does not match grid size " + std::to_string(grid_.size()));
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  std::span<cplx> coeffs() noexcept { return coeffs_; }
  cplx& operator[](std::size_t i) noexcept { return coeffs_[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return coeffs_[i]; }

  /// Coefficient at signed wavenumber index j.
  cplx at_index(long j) const noexcept { return coeffs_[grid_.slot(j)]; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  bool all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
  }

  SpectralField& operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  GridSpec grid_;
  std::vector<cplx> coeffs_;
};

namespace detail {

inline double sign_of_index(long j) noexcept { return (j % 2 == 0) ? 1.0 : -1.0; }

inline double forward_scale(const GridSpec& g, std::size_t m) {
  return (2.0 * g.half_length() / static_cast<double>(m)) / std::sqrt(2.0 * std::numbers::pi);
}

inline double inverse_scale(const GridSpec& g) { return g.dxi() / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace detail

/// Samples of the band-limited interpolant of `field` on a uniform M-point
/// grid of the same interval (M >= N). The Nyquist coefficient is split
/// evenly between +N/2 and -N/2 so the padded field stays real.
inline std::vector<double> to_physical_padded(const SpectralField& field, std::size_t m) {
  const GridSpec& g = field.grid();
  const std::size_t n = g.size();
  if (m < n) throw ConfigurationError("padded size must not be smaller than the grid");
  std::vector<cplx> buf(m, cplx{0.0, 0.0});
  const long half = static_cast<long>(n / 2);
  const long mm = static_cast<long>(m);
  for (std::size_t i = 0; i < n; ++i) {
    const long j = g.index(i);
    const cplx c = field[i] * detail::sign_of_index(j);
    if (j == -half) {
      buf[static_cast<std::size_t>((j + mm) % mm)] += 0.5 * c;
      buf[static_cast<std::size_t>(half % mm)] += 0.5 * c;
    } else {
      buf[static_cast<std::size_t>((j + mm) % mm)] += c;
    }
  }
  std::vector<cplx> out(m);
  fft::backward(buf, out);
  const double s = detail::inverse_scale(g);
  std::vector<double> u(m);
  for (std::size_t i = 0; i < m; ++i) u[i] = out[i].real() * s;
  return u;
}

/// Band-limited projection onto `grid` of M uniform samples on [-L, L).
inline SpectralField from_physical_padded(std::span<const double> samples, const GridSpec& grid) {
  const std::size_t m = samples.size();
  const std::size_t n = grid.size();
  if (m < n) throw ConfigurationError("padded size must not be smaller than the grid");
  std::vector<cplx> buf(samples.begin(), samples.end());
  std::vector<cplx> spec(m);
  fft::forward(buf, spec);
  const double s = detail::forward_scale(grid, m);
  const long half = static_cast<long>(n / 2);
  const long mm = static_cast<long>(m);
  SpectralField out(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const long j = grid.index(i);
    const double sg = detail::sign_of_index(j);
    if (j == -half) {
      const cplx lo = spec[static_cast<std::size_t>((j + mm) % mm)];
      const cplx hi = spec[static_cast<std::size_t>(half % mm)];
      out[i] = 0.5 * (lo + hi) * s * sg;
    } else {
      out[i] = spec[static_cast<std::size_t>((j + mm) % mm)] * s * sg;
    }
  }
  return out;
}

inline SpectralField forward_transform(std::span<const double> samples, const GridSpec& grid) {
  if (samples.size() != grid.size())
    throw ConfigurationError("sample count " + std::to_string(samples.size()) + " does not match grid size " +
                             std::to_string(grid.size()));
  return from_physical_padded(samples, grid);
}

/// Largest violation of c(-xi) = conj(c(xi)), relative to max |c|. The
/// Nyquist coefficient is its own partner and must be real.
inline double hermitian_defect(const SpectralField& field) {
  const double scale = field.max_abs();
  if (scale == 0.0) return 0.0;
  const GridSpec& g = field.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const long j = g.index(i);
    worst = std::max(worst, std::abs(field[i] - std::conj(field.at_index(-j))));
  }
  return worst / scale;
}

inline constexpr double kHermitianTolerance = 1e-10;

/// Real samples of `field` on its own grid. Throws IntegrityError when the
/// coefficients are not Hermitian to within 1e-10 (relative), which in
/// practice signals overflow or corruption upstream.
inline std::vector<double> inverse_transform(const SpectralField& field) {
  const double defect = hermitian_defect(field);
  if (!(defect <= kHermitianTolerance))
    throw IntegrityError("Hermitian symmetry violated: relative defect " + std::to_string(defect));
  const GridSpec& g = field.grid();
  const std::size_t n = g.size();
  std::vector<cplx> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = field[i] * detail::sign_of_index(g.index(i));
  std::vector<cplx> out(n);
  fft::backward(buf, out);
  const double s = detail::inverse_scale(g);
  std::vector<double> u(n);
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = out[i].real() * s;
    max_re = std::max(max_re, std::abs(u[i]));
    max_im = std::max(max_im, std::abs(out[i].imag() * s));
  }
  if (max_im > kHermitianTolerance * std::max(max_re, 1e-300) && max_im > 0.0)
    throw IntegrityError("inverse transform left an imaginary residue of " + std::to_string(max_im));
  return u;
}

/// Multiply by (i xi)^order. The unpaired Nyquist mode is zeroed for odd
/// orders so the result stays real.
inline SpectralField spectral_derivative(const SpectralField& field, int order) {
  if (order < 1 || order > 4) throw ConfigurationError("derivative order must be in {1,2,3,4}");
  const GridSpec& g = field.grid();
  SpectralField out(g);
  const cplx ixi_unit{0.0, 1.0};
  for (std::size_t i = 0; i < field.size(); ++i) {
    if ((order % 2 == 1) && i == g.nyquist_index()) continue;
    const double xi = g.wavenumber(i);
    cplx m{1.0, 0.0};
    for (int r = 0; r < order; ++r) m *= ixi_unit * xi;
    out[i] = m * field[i];
  }
  return out;
}

/// W(t) = exp(i t D^3): c(xi) -> exp(i t xi^3) c(xi). The Nyquist mode has
/// an odd symbol with no real partner and is left unchanged, which keeps
/// the map unitary and real-preserving.
inline SpectralField airy_propagator(const SpectralField& field, double t) {
  const GridSpec& g = field.grid();
  SpectralField out(g);
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (i == g.nyquist_index()) {
      out[i] = field[i];
      continue;
    }
    const double xi = g.wavenumber(i);
    const double phase = t * xi * xi * xi;
    out[i] = cplx{std::cos(phase), std::sin(phase)} * field[i];
  }
  return out;
}

/// Limits on padded work arrays.
struct PowerOptions {
  std::size_t max_padded_points = std::size_t{1} << 24;
};

/// Padded length that keeps a degree-`degree` product alias-free on the
/// retained band: ceil((degree + 1) / 2) * N.
inline std::size_t padded_size(std::size_t n, int degree) {
  return static_cast<std::size_t>((degree + 2) / 2) * n;
}

inline std::size_t checked_padded_size(std::size_t n, int degree, const PowerOptions& opt) {
  const std::size_t m = padded_size(n, degree);
  if (m > opt.max_padded_points) throw ResourceError("padded grid for degree " + std::to_string(degree) +
                                                         " exceeds the memory cap",
                                                     m);
  return m;
}

/// Band-limited coefficients of u^p computed without aliasing.
inline SpectralField dealiased_power(const SpectralField& field, int p, const PowerOptions& opt = {}) {
  if (p < 2) throw ConfigurationError("dealiased_power needs p >= 2");
  const std::size_t m = checked_padded_size(field.size(), p, opt);
  auto u = to_physical_padded(field, m);
  for (auto& v : u) {
    double acc = v;
    for (int r = 1; r < p; ++r) acc *= v;
    v = acc;
  }
  return from_physical_padded(u, field.grid());
}

/// Band-limited coefficients of a * b^q (dealiased for total degree q + 1).
inline SpectralField dealiased_product(const SpectralField& a, const SpectralField& b, int q,
                                       const PowerOptions& opt = {}) {
  const std::size_t m = checked_padded_size(a.size(), q + 1, opt);
  auto ua = to_physical_padded(a, m);
  const auto ub = to_physical_padded(b, m);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = ua[i];
    for (int r = 0; r < q; ++r) acc *= ub[i];
    ua[i] = acc;
  }
  return from_physical_padded(ua, a.grid());
}

/// int u v dx for real fields, by Parseval (exact for band-limited data).
inline double inner_product(const SpectralField& a, const SpectralField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] * std::conj(b[i])).real();
  return s * a.grid().dxi();
}

inline double l2_norm(const SpectralField& a) { return std::sqrt(inner_product(a, a)); }

/// int u^p dx, exact for band-limited u (padded trapezoid rule).
inline double integral_of_power(const SpectralField& field, int p, const PowerOptions& opt = {}) {
  const std::size_t m = checked_padded_size(field.size(), p, opt);
  const auto u = to_physical_padded(field, m);
  double s = 0.0;
  for (double v : u) {
    double acc = v;
    for (int r = 1; r < p; ++r) acc *= v;
    s += acc;
  }
  return s * 2.0 * field.grid().half_length() / static_cast<double>(m);
}

/// Trapezoid quadrature of u^2 in physical space.
inline double physical_l2_squared(std::span<const double> samples, double dx) {
  double s = 0.0;
  for (double v : samples) s += v * v;
  return s * dx;
}

}  // namespace gkdv
