#pragma once

// Conserved and almost-conserved quantities of
//     u_t + u_xxx + mu u^k u_x = 0.

#include <cmath>

#include "gkdv/gevrey.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

/// M(u) = int u^2 dx.
inline double mass(const SpectralField& u) { return inner_product(u, u); }

inline double power_term_coefficient(int k, int mu) {
  return 2.0 * static_cast<double>(mu) / static_cast<double>((k + 1) * (k + 2));
}

/// E(u) = int u_x^2 dx - 2 mu / ((k+1)(k+2)) int u^{k+2} dx.
inline double energy(const SpectralField& u, int k, int mu, const PowerOptions& opt = {}) {
  const SpectralField ux = spectral_derivative(u, 1);
  return inner_product(ux, ux) - power_term_coefficient(k, mu) * integral_of_power(u, k + 2, opt);
}

namespace detail {

inline double modified_energy_of_weighted(const SpectralField& weighted, int k, int mu, const PowerOptions& opt) {
  const SpectralField wx = spectral_derivative(weighted, 1);
  return inner_product(weighted, weighted) + inner_product(wx, wx) -
         power_term_coefficient(k, mu) * integral_of_power(weighted, k + 2, opt);
}

}  // namespace detail

/// E_sigma(u) = int U^2 + int U_x^2 - 2 mu / ((k+1)(k+2)) int U^{k+2},
/// U = e^{sigma |D_x|} u. For sigma = 0 this is M(u) + E(u).
inline double modified_energy(const SpectralField& u, double sigma, int k, int mu, const GevreyParams& gp = {},
                              const PowerOptions& opt = {}) {
  return detail::modified_energy_of_weighted(exp_multiplier(u, sigma, gp), k, mu, opt);
}

/// int U^2 + int U_x^2, the quadratic part of E_sigma. Since
/// (1+|xi|)^2 / 2 <= 1 + xi^2 <= (1+|xi|)^2 it is equivalent to the squared
/// G^{sigma,1} norm within a factor 2.
inline double quadratic_energy(const SpectralField& u, double sigma, const GevreyParams& gp = {}) {
  const SpectralField w = exp_multiplier(u, sigma, gp);
  const SpectralField wx = spectral_derivative(w, 1);
  return inner_product(w, w) + inner_product(wx, wx);
}

/// Pieces of the commutator computation shared by F and dE_sigma/dt.
struct CommutatorTerms {
  SpectralField weighted;        ///< U = e^{sigma|D|} u (noise-floored)
  SpectralField weighted_power;  ///< P(U^{k+1})
  SpectralField remainder;       ///< F(U)
};

/// F(U) = mu/(k+1) d/dx [ U^{k+1} - e^{sigma|D|}((e^{-sigma|D|} U)^{k+1}) ], evaluated from
/// u as mu/(k+1) d/dx [ P(U^{k+1}) - e^{sigma|D|} P(u^{k+1}) ] with dealiased powers.
inline CommutatorTerms commutator_terms(const SpectralField& u, double sigma, int k, int mu,
                                        const GevreyParams& gp = {}, const PowerOptions& opt = {}) {
  const SpectralField base = checked_denoise(u, sigma, gp);
  SpectralField weighted = apply_exp_weight(base, sigma);
  SpectralField weighted_power = dealiased_power(weighted, k + 1, opt);
  SpectralField remainder(u.grid());
  if (sigma > 0.0) {
    SpectralField bracket_term = weighted_power - apply_exp_weight(dealiased_power(base, k + 1, opt), sigma);
    remainder = (static_cast<double>(mu) / static_cast<double>(k + 1)) * spectral_derivative(bracket_term, 1);
  }
  return {std::move(weighted), std::move(weighted_power), std::move(remainder)};
}

inline SpectralField commutator_remainder(const SpectralField& u, double sigma, int k, int mu,
                                          const GevreyParams& gp = {}, const PowerOptions& opt = {}) {
  return commutator_terms(u, sigma, k, mu, gp, opt).remainder;
}

/// dE_sigma/dt = 2 int U F + 2 int U_x F_x - 2 mu/(k+1) int U^{k+1} F, the
/// integrand of R_sigma. Every pairing involves a band-limited factor, so
/// Parseval evaluates it without quadrature error.
inline double modified_energy_rate(const SpectralField& u, double sigma, int k, int mu, const GevreyParams& gp = {},
                                   const PowerOptions& opt = {}) {
  if (sigma == 0.0) return 0.0;
  const auto t = commutator_terms(u, sigma, k, mu, gp, opt);
  const SpectralField ux = spectral_derivative(t.weighted, 1);
  const SpectralField fx = spectral_derivative(t.remainder, 1);
  return 2.0 * inner_product(t.weighted, t.remainder) + 2.0 * inner_product(ux, fx) -
         2.0 * static_cast<double>(mu) / static_cast<double>(k + 1) * inner_product(t.weighted_power, t.remainder);
}

}  // namespace gkdv
