#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gkdv/errors.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

struct GevreyParams {
  double sigma = 0.0;
  double s = 1.0;
  double amp_guard = 700.0;  ///< cap on sigma |xi| + log|c| inside exponentials
  double fit_floor = 1e-12;  ///< relative magnitude treated as numerical noise

  void validate() const {
    std::vector<std::string> problems;
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) problems.push_back("gevrey.sigma must be >= 0");
    if (!(amp_guard > 0.0)) problems.push_back("gevrey.amp_guard must be > 0");
    if (!(fit_floor > 0.0 && fit_floor < 1.0)) problems.push_back("gevrey.fit_floor must lie in (0, 1)");
    if (!std::isfinite(s)) problems.push_back("gevrey.s must be finite");
    if (!problems.empty()) throw ValidationError(std::move(problems));
  }
};

/// Japanese bracket used throughout: <xi> = 1 + |xi|.
inline double bracket(double xi) noexcept { return 1.0 + std::abs(xi); }

/// Shell-averaged spectrum a_j = sqrt((|c_j|^2 + |c_-j|^2) / 2), j = 0..N/2-1.
inline std::vector<double> radial_spectrum(const SpectralField& field) {
  const std::size_t half = field.size() / 2;
  std::vector<double> a(half);
  for (std::size_t j = 0; j < half; ++j) {
    const double p = std::norm(field.at_index(static_cast<long>(j)));
    const double q = std::norm(field.at_index(-static_cast<long>(j)));
    a[j] = std::sqrt(0.5 * (p + q));
  }
  return a;
}

/// First shell past the spectral peak whose amplitude drops below max/10.
/// Everything below it is the prefactor-dominated head of the spectrum.
inline std::size_t head_end(const std::vector<double>& a) {
  const auto peak = static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
  const double amax = a[peak];
  for (std::size_t j = peak; j < a.size(); ++j)
    if (a[j] < 0.1 * amax) return j;
  return a.size();
}

/// e^{sigma |xi|} without floor or guard checks; for internal use on
/// quantities (products, remainders) whose decay is inherited from a field
/// that has already passed exp_multiplier's checks.
inline SpectralField apply_exp_weight(const SpectralField& field, double sigma) {
  SpectralField out = field;
  if (sigma == 0.0) return out;
  const GridSpec& g = field.grid();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(sigma * std::abs(g.wavenumber(i)));
  return out;
}

/// Zero coefficients below fit_floor * max|c| after checking that
/// e^{sigma |D_x|} can be applied. The floor is decided per pair (xi, -xi)
/// so Hermitian symmetry survives. The result is rejected
/// (AnalyticityExceeded) if any retained mode would overflow the guard, or
/// if the weighted spectrum e^{sigma|xi|}|c| peaks in the upper part of the
/// retained band, i.e. sigma exceeds the field's decay rate.
inline SpectralField checked_denoise(const SpectralField& field, double sigma, const GevreyParams& params = {}) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigurationError("sigma must be finite and >= 0");
  const GridSpec& g = field.grid();
  const double cmax = field.max_abs();
  if (sigma == 0.0 || cmax == 0.0) return field;
  const double floor = params.fit_floor * cmax;

  SpectralField out(g);
  std::vector<double> log_weighted(field.size(), -std::numeric_limits<double>::infinity());
  double xi_top = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double pair = std::max(std::abs(field[i]), std::abs(field.at_index(-g.index(i))));
    if (pair < floor || field[i] == cplx{0.0, 0.0}) continue;
    const double axi = std::abs(g.wavenumber(i));
    log_weighted[i] = sigma * axi + std::log(std::abs(field[i]));
    if (sigma * axi > params.amp_guard || log_weighted[i] > params.amp_guard)
      throw AnalyticityExceeded("exp multiplier overflow risk at xi = " + std::to_string(axi) +
                                " (sigma = " + std::to_string(sigma) + ")");
    xi_top = std::max(xi_top, axi);
    out[i] = field[i];
  }

  // Split at half the retained band, or past the spectral head for fields
  // with only a handful of modes.
  const double xi_split = std::max(0.5 * xi_top, g.dxi() * static_cast<double>(head_end(radial_spectrum(field))));
  double head_peak = -std::numeric_limits<double>::infinity(), tail_peak = head_peak;
  for (std::size_t i = 0; i < field.size(); ++i) {
    double& peak = std::abs(g.wavenumber(i)) <= xi_split ? head_peak : tail_peak;
    peak = std::max(peak, log_weighted[i]);
  }
  if (tail_peak > head_peak)
    throw AnalyticityExceeded("sigma = " + std::to_string(sigma) +
                              " exceeds the radius of analyticity supported by the spectrum");
  return out;
}

/// e^{sigma |D_x|}: c(xi) -> e^{sigma |xi|} c(xi), with the noise floor
/// and analyticity checks of checked_denoise. sigma = 0 is the identity.
inline SpectralField exp_multiplier(const SpectralField& field, double sigma, const GevreyParams& params = {}) {
  return apply_exp_weight(checked_denoise(field, sigma, params), sigma);
}

/// ||f||_{G^{sigma,s}} = (sum <xi>^{2s} e^{2 sigma |xi|} |c|^2 dxi)^{1/2}.
inline double gevrey_norm(const SpectralField& field, const GevreyParams& params) {
  const SpectralField w = exp_multiplier(field, params.sigma, params);
  const GridSpec& g = field.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double b = std::pow(bracket(g.wavenumber(i)), params.s);
    acc += b * b * std::norm(w[i]);
  }
  return std::sqrt(acc * g.dxi());
}

/// Diagnostics of the log-linear decay fit behind estimate_radius.
struct DecayFit {
  double sigma = 0.0;          ///< fitted decay rate, clamped at 0
  double max_residual = 0.0;   ///< largest |residual| of the line fit (natural log)
  double curvature = 0.0;      ///< quadratic coefficient of the residuals
  std::size_t n_modes = 0;     ///< shells in the fit band
  std::size_t n_points = 0;    ///< block maxima actually fitted
  bool superexponential = false;
};

namespace detail {

// Uniform-weight least-squares polynomial fit in powers of (x - xbar).
inline Eigen::VectorXd polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree,
                               double xbar) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd basis(n, degree + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = x[static_cast<std::size_t>(i)] - xbar;
    double p = 1.0;
    for (int r = 0; r <= degree; ++r, p *= d) basis(i, r) = p;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  return basis.colPivHouseholderQr().solve(rhs);
}

}  // namespace detail

/// Fit log a(xi) ~ c - sigma xi over the decay band of the spectrum.
///
/// The band starts at the first shell below max/10 and ends before the first
/// shell below fit_floor * max. Shells are grouped into blocks and the block
/// maxima are fitted, which removes the deep interference notches of
/// multi-bump data without biasing a clean exponential. A line fit whose
/// residuals exceed 2 (natural log) with concave-down curvature marks
/// superexponential (entire-function-like) decay.
inline DecayFit fit_decay(const SpectralField& field, const GevreyParams& params = {}) {
  const auto a = radial_spectrum(field);
  const double amax = *std::max_element(a.begin(), a.end());
  if (!(amax > 0.0)) throw InsufficientResolution("cannot estimate the radius of a zero field");
  const std::size_t lo = head_end(a);
  std::size_t hi = lo;
  while (hi < a.size() && a[hi] >= params.fit_floor * amax) ++hi;
  const std::size_t nband = hi - lo;
  if (nband < 8)
    throw InsufficientResolution("only " + std::to_string(nband) + " usable modes in the decay band (need 8)");

  const double dxi = field.grid().dxi();
  const std::size_t block = std::max<std::size_t>(1, nband / 24);
  std::vector<double> xs, ys;
  for (std::size_t b0 = lo; b0 < hi; b0 += block) {
    const std::size_t b1 = std::min(hi, b0 + block);
    std::size_t best = b0;
    for (std::size_t j = b0; j < b1; ++j)
      if (a[j] > a[best]) best = j;
    xs.push_back(dxi * static_cast<double>(best));
    ys.push_back(std::log(a[best]));
  }

  DecayFit fit;
  fit.n_modes = nband;
  fit.n_points = xs.size();
  double xbar = 0.0;
  for (double x : xs) xbar += x;
  xbar /= static_cast<double>(xs.size());
  const auto line = detail::polyfit(xs, ys, 1, xbar);
  std::vector<double> res(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    res[i] = ys[i] - (line[0] + line[1] * (xs[i] - xbar));
    fit.max_residual = std::max(fit.max_residual, std::abs(res[i]));
  }
  if (xs.size() >= 3) fit.curvature = detail::polyfit(xs, res, 2, xbar)[2];
  fit.superexponential = fit.max_residual > 2.0 && fit.curvature < 0.0;
  fit.sigma = std::max(0.0, -line[1]);
  return fit;
}

/// Uniform radius of analyticity read off the exponential decay of |u^(xi)|
/// (Paley-Wiener). Returns +infinity when the decay is superexponential.
inline double estimate_radius(const SpectralField& field, const GevreyParams& params = {}) {
  const DecayFit fit = fit_decay(field, params);
  if (fit.superexponential) return std::numeric_limits<double>::infinity();
  return fit.sigma;
}

}  // namespace gkdv
