#pragma once

// The energy identity E_sigma(t) = E_sigma(0) + R_sigma(t) checked along a
// simulation, and the sigma-scaling study of sup_t |E_sigma(t) - E_sigma(0)|.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/functionals.hpp"
#include "gkdv/gevrey.hpp"
#include "gkdv/solver.hpp"

namespace gkdv {

struct EnergyReport {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double e_sigma = 0.0;
  double r_sigma = 0.0;
  double identity_residual = 0.0;  ///< |E_sigma(t) - E_sigma(0) - R_sigma(t)|
  double quadrature_error = 0.0;   ///< step-halving estimate of the error in r_sigma
};

/// Cumulative trapezoid of dE_sigma/dt over the given states (sorted in t).
/// Entry i is R_sigma(t_i); entry 0 is 0.
inline std::vector<double> remainder_integral(const std::vector<SimulationState>& states, double sigma, int k, int mu,
                                              const GevreyParams& gp = {}, const PowerOptions& opt = {}) {
  std::vector<double> r(states.size(), 0.0);
  if (states.empty() || sigma == 0.0) return r;
  double prev = modified_energy_rate(states[0].field, sigma, k, mu, gp, opt);
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double cur = modified_energy_rate(states[i].field, sigma, k, mu, gp, opt);
    r[i] = r[i - 1] + 0.5 * (states[i].t - states[i - 1].t) * (prev + cur);
    prev = cur;
  }
  return r;
}

/// Energy reports at the states with even index. `states` must be sampled
/// uniformly in time with an odd count; R_sigma is the fine trapezoid over
/// all samples and the error estimate accumulates |fine - coarse| / 3 per
/// coarse interval, coarse being the trapezoid over even samples only.
inline std::vector<EnergyReport> energy_reports(const std::vector<SimulationState>& states, double sigma, int k,
                                                int mu, const GevreyParams& gp = {}, const PowerOptions& opt = {}) {
  if (states.empty() || states.size() % 2 == 0)
    throw ConfigurationError("energy_reports needs an odd number of uniformly spaced states");
  std::vector<double> rate(states.size(), 0.0);
  if (sigma > 0.0)
    for (std::size_t i = 0; i < states.size(); ++i)
      rate[i] = modified_energy_rate(states[i].field, sigma, k, mu, gp, opt);

  std::vector<EnergyReport> out;
  double fine = 0.0, err = 0.0, e0 = 0.0;
  for (std::size_t i = 0; i < states.size(); i += 2) {
    if (i > 0) {
      const double h = states[i].t - states[i - 1].t;
      const double a2 = 0.5 * h * (rate[i - 2] + 2.0 * rate[i - 1] + rate[i]);
      const double a1 = h * (rate[i - 2] + rate[i]);
      fine += a2;
      err += std::abs(a1 - a2) / 3.0;
    }
    const SpectralField& u = states[i].field;
    EnergyReport rep;
    rep.t = states[i].t;
    rep.mass = mass(u);
    rep.energy = energy(u, k, mu, opt);
    rep.e_sigma = modified_energy(u, sigma, k, mu, gp, opt);
    if (i == 0) e0 = rep.e_sigma;
    rep.r_sigma = fine;
    rep.identity_residual = std::abs(rep.e_sigma - e0 - fine);
    rep.quadrature_error = err;
    out.push_back(rep);
  }
  return out;
}

struct EnergyRun {
  std::vector<EnergyReport> reports;  ///< one per trace record
  SimulationResult result;
};

/// Simulate and evaluate the energy identity at every monitor record. The
/// rate is sampled every monitor_stride/2 steps, so the stride must be even.
inline EnergyRun run_energy_identity(const SpectralField& u0, const SolverConfig& cfg, const GevreyParams& gevrey) {
  if (cfg.monitor_stride % 2 != 0)
    throw ValidationError({"solver.monitor_stride must be even for the energy identity check"});
  if (static_cast<double>(cfg.monitor_stride) * cfg.dt > 1e-2)
    throw ValidationError({"solver.monitor_stride * solver.dt must be <= 1e-2 for the energy identity check"});
  const std::int64_t half = cfg.monitor_stride / 2;
  std::vector<SimulationState> samples;
  auto observer = [&](const SimulationState& s) {
    if (s.step_count % half == 0) samples.push_back(s);
  };
  SimulationResult result = simulate(u0, cfg, gevrey, observer);
  if (samples.size() % 2 == 0) samples.pop_back();
  return {energy_reports(samples, gevrey.sigma, cfg.k, cfg.mu, gevrey, cfg.power), std::move(result)};
}

/// Phi(E) = E^{k/2+1} (1 + E^{k/2}), the energy factor of the almost
/// conservation bound sup E_sigma <= E_sigma(0) + C sigma^alpha Phi(E_sigma(0)).
inline double almost_conservation_factor(double e, int k) {
  const double h = std::pow(e, 0.5 * k);
  return e * h * (1.0 + h);
}

struct SweepRow {
  double sigma = 0.0;
  double drift = 0.0;     ///< D(sigma) = sup_t |E_sigma(t) - E_sigma(0)|
  double e_sigma0 = 0.0;  ///< E_sigma(0)
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;      ///< least-squares slope of log D against log sigma
  double intercept = 0.0;  ///< log D at sigma = 1 on the fitted line
  std::vector<TraceRecord> trace;  ///< diagnostics of the shared trajectory
};

/// n sigmas log-spaced over `decades` decades ending at sigma_top.
inline std::vector<double> log_spaced_sigmas(double sigma_top, int n = 8, double decades = 2.5) {
  if (!(sigma_top > 0.0) || n < 2) throw ConfigurationError("need sigma_top > 0 and at least two sigmas");
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    s[static_cast<std::size_t>(i)] = sigma_top * std::pow(10.0, -decades * (n - 1 - i) / static_cast<double>(n - 1));
  return s;
}

/// Least-squares line through (log x, log y). Returns {slope, intercept}.
inline std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const auto c = detail::polyfit(lx, ly, 1, 0.0);
  return {c[1], c[0]};
}

/// D(sigma) for every sigma along one trajectory from u0. The trajectory
/// does not depend on sigma, so it is computed once and every E_sigma is
/// evaluated on the same states.
inline SweepResult almost_conservation_sweep(const SpectralField& u0, const SolverConfig& cfg,
                                             const std::vector<double>& sigmas, const GevreyParams& base = {}) {
  if (cfg.mu != -1 || cfg.k % 2 != 0)
    throw ValidationError({"almost-conservation sweep requires mu = -1 and even k"});
  if (sigmas.size() < 2) throw ConfigurationError("sweep needs at least two sigmas");
  for (double s : sigmas)
    if (!(s > 0.0)) throw ConfigurationError("sweep sigmas must be positive");

  SweepResult res;
  res.rows.resize(sigmas.size());
  std::vector<GevreyParams> params(sigmas.size(), base);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    params[i].sigma = sigmas[i];
    res.rows[i].sigma = sigmas[i];
    res.rows[i].e_sigma0 = modified_energy(u0, sigmas[i], cfg.k, cfg.mu, params[i], cfg.power);
  }
  const auto stride = static_cast<std::int64_t>(cfg.monitor_stride);
  auto observer = [&](const SimulationState& s) {
    if (s.step_count % stride != 0) return;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      const double e = modified_energy(s.field, sigmas[i], cfg.k, cfg.mu, params[i], cfg.power);
      res.rows[i].drift = std::max(res.rows[i].drift, std::abs(e - res.rows[i].e_sigma0));
    }
  };
  res.trace = simulate(u0, cfg, base, observer).trace;

  std::vector<double> xs, ys;
  for (const auto& r : res.rows) {
    if (!(r.drift > 0.0)) continue;
    xs.push_back(r.sigma);
    ys.push_back(r.drift);
  }
  if (xs.size() < 2) throw InsufficientResolution("fewer than two sigmas with nonzero drift");
  std::tie(res.slope, res.intercept) = loglog_fit(xs, ys);
  return res;
}

/// Smallest C with D(sigma) <= C sigma^alpha Phi(E_sigma(0)) on every row.
inline double fitted_almost_conservation_constant(const SweepResult& sweep, double alpha, int k) {
  double c = 0.0;
  for (const auto& r : sweep.rows)
    c = std::max(c, r.drift / (std::pow(r.sigma, alpha) * almost_conservation_factor(r.e_sigma0, k)));
  return c;
}

}  // namespace gkdv
