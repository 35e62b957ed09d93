#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "gkdv/errors.hpp"

namespace gkdv {

/// Uniform periodic grid on [-L, L) with N collocation points.
///
/// Coefficient arrays use FFT storage order: index i holds wavenumber
/// index j = i for i < N/2 and j = i - N otherwise, so j runs over
/// {-N/2, ..., N/2 - 1} and the single Nyquist mode sits at i = N/2.
class GridSpec {
 public:
  GridSpec(double half_length, std::size_t n_modes) : half_length_(half_length), n_(n_modes) {
    if (!(half_length > 0.0) || !std::isfinite(half_length))
      throw ConfigurationError("grid half_length must be positive and finite");
    if (n_modes < 16 || (n_modes & (n_modes - 1)) != 0)
      throw ConfigurationError("grid n_modes must be a power of two >= 16, got " +
                               std::to_string(n_modes));
  }

  static GridSpec standard(std::size_t n_modes = 1024) {
    return GridSpec(32.0 * std::numbers::pi, n_modes);
  }

  double half_length() const noexcept { return half_length_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return 2.0 * half_length_ / static_cast<double>(n_); }
  double dxi() const noexcept { return std::numbers::pi / half_length_; }
  std::size_t nyquist_index() const noexcept { return n_ / 2; }

  /// Signed wavenumber index j of storage slot i.
  long index(std::size_t i) const noexcept {
    return i < n_ / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n_);
  }
  /// Storage slot of signed index j (mod N).
  std::size_t slot(long j) const noexcept {
    const long n = static_cast<long>(n_);
    return static_cast<std::size_t>(((j % n) + n) % n);
  }
  double wavenumber(std::size_t i) const noexcept { return dxi() * static_cast<double>(index(i)); }
  double max_wavenumber() const noexcept { return dxi() * static_cast<double>(n_ / 2); }
  double x(std::size_t n) const noexcept { return -half_length_ + dx() * static_cast<double>(n); }

  std::vector<double> wavenumbers() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = wavenumber(i);
    return out;
  }
  std::vector<double> points() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
    return out;
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.half_length_ == b.half_length_ && a.n_ == b.n_;
  }

 private:
  double half_length_;
  std::size_t n_;
};

}  // namespace gkdv
