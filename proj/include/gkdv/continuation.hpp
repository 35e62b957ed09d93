#pragma once

// Lifespan, time step and radius schedule of the global continuation
// argument for defocusing even k, and their comparison with simulations.
//
// With E0 = E_{sigma0}(0) and Phi(E) = E^{k/2+1} (1 + E^{k/2}):
//
//     T0    = c0 / (1 + E0)^a
//     delta = c0 / (1 + 2 E0)^a
//     sigma(T) = min(sigma0, c1 T^{-1/alpha}),
//     c1 = [delta / (2^{k+2} C E0^{k/2} (1 + E0^{k/2}))]^{1/alpha}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkdv/energy.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/functionals.hpp"
#include "gkdv/gevrey.hpp"
#include "gkdv/solver.hpp"

namespace gkdv {

struct ContinuationParams {
  double sigma0 = 0.5;
  int k = 4;
  int mu = -1;
  double s = 1.0;
  double a = 20.0;    ///< lifespan exponent 1/(b' - b)
  double c0 = 1.0;    ///< lifespan constant, calibrated
  double c_ac = 1.0;  ///< almost-conservation constant C
  double alpha = 0.95;

  double alpha_limit() const { return (k + 4) / (2.0 * k); }

  void validate() const {
    std::vector<std::string> problems;
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) problems.push_back("continuation.sigma0 must be > 0");
    if (k < 4 || k % 2 != 0) problems.push_back("solver.k: k must be even >= 4 for continuation");
    if (mu != -1) problems.push_back("solver.mu: mu must be -1 (defocusing) for continuation");
    if (!(s > (k - 4) / (2.0 * k))) problems.push_back("continuation.s must exceed (k-4)/(2k)");
    if (!(a > 1.0)) problems.push_back("continuation.a must be > 1");
    if (!(c0 > 0.0) || !std::isfinite(c0)) problems.push_back("continuation.c0 must be > 0");
    if (!(c_ac > 0.0) || !std::isfinite(c_ac)) problems.push_back("continuation.c_ac must be > 0");
    if (!(alpha > 0.0 && alpha < alpha_limit())) problems.push_back("continuation.alpha must lie in (0, (k+4)/(2k))");
    if (!problems.empty()) throw ValidationError(std::move(problems));
  }
};

/// T0 from the G^{sigma,s} norm of the data: c0 / (1 + |u0|^2)^{k a / 2}.
inline double local_timespan(double u0_norm, const ContinuationParams& p) {
  if (!(u0_norm >= 0.0)) throw ConfigurationError("u0_norm must be >= 0");
  return p.c0 * std::pow(1.0 + u0_norm * u0_norm, -0.5 * p.k * p.a);
}

/// T0 in the energy form used for s = 1: c0 / (1 + E0)^a.
inline double energy_timespan(double e0, const ContinuationParams& p) { return p.c0 * std::pow(1.0 + e0, -p.a); }

/// Continuation time step delta = c0 / (1 + 2 E0)^a; never exceeds the energy-form T0.
inline double time_step(double e0, const ContinuationParams& p) { return p.c0 * std::pow(1.0 + 2.0 * e0, -p.a); }

/// Left side of the smallness condition; the schedule is where it equals 1.
inline double smallness_condition(double e0, double t, double sigma, const ContinuationParams& p) {
  const double h = std::pow(e0, 0.5 * p.k);
  return std::ldexp(1.0, p.k + 2) * (t / time_step(e0, p)) * p.c_ac * std::pow(sigma, p.alpha) * h * (1.0 + h);
}

inline double schedule_prefactor(double e0, const ContinuationParams& p) {
  const double h = std::pow(e0, 0.5 * p.k);
  return std::pow(time_step(e0, p) / (std::ldexp(1.0, p.k + 2) * p.c_ac * h * (1.0 + h)), 1.0 / p.alpha);
}

/// Time beyond which the schedule leaves sigma0.
inline double schedule_crossover(double e0, const ContinuationParams& p) {
  return std::pow(schedule_prefactor(e0, p) / p.sigma0, p.alpha);
}

inline double schedule_radius(double e0, double t, const ContinuationParams& p) {
  if (!(e0 > 0.0) || !(t > 0.0)) throw ConfigurationError("schedule_radius needs E0 > 0 and T > 0");
  // In log form the T-exponent is exact up to one rounding.
  const double log_sigma = std::log(schedule_prefactor(e0, p)) - std::log(t) / p.alpha;
  return std::min(p.sigma0, std::exp(log_sigma));
}

/// The same radius found by bisection on the smallness condition.
inline double schedule_radius_bisection(double e0, double t, const ContinuationParams& p) {
  if (!(e0 > 0.0) || !(t > 0.0)) throw ConfigurationError("schedule_radius needs E0 > 0 and T > 0");
  if (smallness_condition(e0, t, p.sigma0, p) <= 1.0) return p.sigma0;
  double lo = 0.0, hi = p.sigma0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (smallness_condition(e0, t, mid, p) <= 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Decay exponent 2k/(k+4) approached as alpha -> (k+4)/(2k).
inline double limiting_exponent(int k) { return 2.0 * k / (k + 4.0); }

struct ScheduleRow {
  double t = 0.0;
  double sigma_theoretical = 0.0;
  double sigma_measured = 0.0;
  double delta = 0.0;
  std::int64_t n_steps = 0;
  double e_sigma_sup = 0.0;
  double bound_margin = 0.0;
};

struct RadiusSchedule {
  std::vector<ScheduleRow> rows;
  double e0 = 0.0;           ///< E_{sigma0}(0)
  double t0 = 0.0;           ///< energy-form lifespan
  double delta = 0.0;
  double c1 = 0.0;           ///< uncalibrated prefactor
  double calibration = 1.0;  ///< factor applied to c1, never above 1
};

namespace detail {

/// (bound - E_sigma(0)) / (sup - E_sigma(0)); +inf when E_sigma never rose.
inline double bound_margin(double bound, double e_start, double sup) {
  const double rise = sup - e_start;
  if (!(rise > 0.0)) return std::numeric_limits<double>::infinity();
  return (bound - e_start) / rise;
}

/// Copy of cfg whose own trace records are suppressed; callers sample
/// through observers at cfg.monitor_stride instead.
inline SolverConfig quiet(SolverConfig cfg) {
  cfg.monitor_stride = std::numeric_limits<int>::max();
  return cfg;
}

/// Solver config with the largest dt <= cfg.dt that divides span evenly.
inline std::pair<SolverConfig, std::int64_t> fit_steps(SolverConfig cfg, double span) {
  const auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / cfg.dt - 1e-9)));
  cfg.dt = span / static_cast<double>(n);
  return {cfg, n};
}

}  // namespace detail

struct InductionStep {
  int j = 0;
  double t = 0.0;
  double e_sigma_sup = 0.0;     ///< sup of E_sigma over [0, j delta]
  double energy_bound = 0.0;    ///< E_sigma(0) + 2^{k+1} C sigma^alpha j Phi(E0)
  double objective_bound = 0.0; ///< 2 E0
  double margin = 0.0;          ///< smaller margin of the two bounds
  bool holds = false;
};

struct InductionResult {
  ScheduleRow row;
  double sigma = 0.0;
  double e_sigma_start = 0.0;  ///< E_sigma(0) at the scheduled sigma
  double e0 = 0.0;             ///< E_{sigma0}(0)
  std::int64_t steps_per_interval = 0;
  std::vector<InductionStep> steps;
  std::vector<std::pair<double, double>> trace;  ///< (t, E_sigma(t)) at the sampled states
  SimulationState final_state;

  bool holds() const {
    return std::all_of(steps.begin(), steps.end(), [](const InductionStep& s) { return s.holds; });
  }
};

/// Chain n = ceil(T / delta) subintervals of length delta from u0 and check
/// both induction bounds at every j delta. E_sigma is sampled every
/// monitor_stride steps and at every subinterval end. A violated bound is
/// reported in the result, not thrown.
inline InductionResult iterate_energy_induction(const SpectralField& u0, double t_total, const ContinuationParams& p,
                                                const SolverConfig& base, std::optional<double> sigma_override = {}) {
  p.validate();
  if (base.k != p.k || base.mu != p.mu) throw ValidationError({"solver k and mu must match the continuation params"});
  if (!(t_total > 0.0)) throw ConfigurationError("induction needs T > 0");

  InductionResult res{.row = {}, .sigma = 0.0, .e_sigma_start = 0.0, .e0 = 0.0, .steps_per_interval = 0,
                      .steps = {}, .trace = {}, .final_state = {0.0, u0, 0}};
  res.e0 = modified_energy(u0, p.sigma0, p.k, p.mu);
  const double delta = time_step(res.e0, p);
  res.sigma = sigma_override ? *sigma_override : schedule_radius(res.e0, t_total, p);
  const auto n = std::max(1, static_cast<int>(std::ceil(t_total / delta - 1e-9)));
  auto [cfg, per] = detail::fit_steps(base, delta);
  res.steps_per_interval = per;
  check_start(u0, cfg);

  const GevreyParams gp{res.sigma};
  const double h = std::pow(res.e0, 0.5 * p.k);
  const double phi = res.e0 * h * (1.0 + h);
  const auto stride = static_cast<std::int64_t>(cfg.monitor_stride);
  res.e_sigma_start = modified_energy(u0, res.sigma, p.k, p.mu, gp, cfg.power);
  double sup = res.e_sigma_start;
  auto sample = [&](const SimulationState& s) {
    const double e = modified_energy(s.field, res.sigma, p.k, p.mu, gp, cfg.power);
    res.trace.emplace_back(s.t, e);
    sup = std::max(sup, e);
  };

  SimulationState state{0.0, u0, 0};
  sample(state);
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= n; ++j) {
    const auto observer = [&](const SimulationState& s) {
      if (s.step_count > state.step_count && (s.step_count % stride == 0 || s.step_count == j * per)) sample(s);
    };
    state = simulate_steps(state, per, detail::quiet(cfg), gp, observer, false).final_state;
    InductionStep st;
    st.j = j;
    st.t = state.t;
    st.e_sigma_sup = sup;
    st.energy_bound = res.e_sigma_start + std::ldexp(1.0, p.k + 1) * p.c_ac * std::pow(res.sigma, p.alpha) * j * phi;
    st.objective_bound = 2.0 * res.e0;
    st.holds = sup <= st.energy_bound && sup <= st.objective_bound;
    st.margin = std::min(detail::bound_margin(st.energy_bound, res.e_sigma_start, sup),
                         detail::bound_margin(st.objective_bound, res.e_sigma_start, sup));
    worst_margin = std::min(worst_margin, st.margin);
    res.steps.push_back(st);
  }
  res.final_state = state;

  res.row.t = state.t;
  res.row.sigma_theoretical = res.sigma;
  res.row.sigma_measured = estimate_radius(state.field, {});
  res.row.delta = delta;
  res.row.n_steps = state.step_count;
  res.row.e_sigma_sup = sup;
  res.row.bound_margin = worst_margin;
  return res;
}

/// {T0, 2 T0, 4 T0, ...} with n entries.
inline std::vector<double> doubling_times(double t0, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(std::ldexp(t0, i));
  return out;
}

/// Run one trajectory through every T and compare the estimated radius with
/// the schedule. The prefactor c1 is lowered once, at T0, so the envelope
/// passes through the radius measured there when it would otherwise lie
/// above it. e_sigma_sup is the sup over [0, T] of E_sigma at the row's
/// envelope radius and bound_margin refers to the bound 2 E0.
inline RadiusSchedule envelope_vs_measured(const SpectralField& u0, std::vector<double> times,
                                           const ContinuationParams& p, const SolverConfig& cfg) {
  p.validate();
  if (cfg.k != p.k || cfg.mu != p.mu) throw ValidationError({"solver k and mu must match the continuation params"});
  if (times.empty()) throw ConfigurationError("envelope needs at least one T");
  std::sort(times.begin(), times.end());
  if (!(times.front() > 0.0)) throw ConfigurationError("envelope times must be positive");
  check_start(u0, cfg);

  RadiusSchedule sch;
  sch.e0 = modified_energy(u0, p.sigma0, p.k, p.mu);
  sch.t0 = energy_timespan(sch.e0, p);
  sch.delta = time_step(sch.e0, p);
  sch.c1 = schedule_prefactor(sch.e0, p);

  const auto to_steps = [&](double t) { return std::max<std::int64_t>(1, std::llround(t / cfg.dt)); };
  std::vector<std::int64_t> marks{to_steps(sch.t0)};
  for (double t : times) marks.push_back(to_steps(t));
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  const auto stride = static_cast<std::int64_t>(cfg.monitor_stride);
  std::vector<SimulationState> samples;
  std::vector<SimulationState> at_marks;
  SimulationState state{0.0, u0, 0};
  samples.push_back(state);
  for (std::int64_t m : marks) {
    const auto observer = [&](const SimulationState& s) {
      if (s.step_count > state.step_count && (s.step_count % stride == 0 || s.step_count == m)) samples.push_back(s);
    };
    state = simulate_steps(state, m - state.step_count, detail::quiet(cfg), {}, observer, false).final_state;
    at_marks.push_back(state);
  }
  auto state_at = [&](std::int64_t m) -> const SimulationState& {
    return at_marks[static_cast<std::size_t>(std::find(marks.begin(), marks.end(), m) - marks.begin())];
  };

  const SimulationState& s0 = state_at(to_steps(sch.t0));
  const double measured0 = estimate_radius(s0.field, {});
  const double raw0 = sch.c1 * std::pow(s0.t, -1.0 / p.alpha);
  sch.calibration = std::isfinite(measured0) && raw0 > measured0 ? measured0 / raw0 : 1.0;

  for (double t : times) {
    const SimulationState& s = state_at(to_steps(t));
    ScheduleRow row;
    row.t = s.t;
    row.sigma_theoretical =
        std::min(p.sigma0, sch.calibration * sch.c1 * std::pow(s.t, -1.0 / p.alpha));
    row.sigma_measured = estimate_radius(s.field, {});
    row.delta = sch.delta;
    row.n_steps = s.step_count;
    const GevreyParams gp{row.sigma_theoretical};
    const double e_start = modified_energy(u0, row.sigma_theoretical, p.k, p.mu, gp, cfg.power);
    double sup = e_start;
    for (const auto& smp : samples)
      if (smp.step_count <= s.step_count)
        sup = std::max(sup, modified_energy(smp.field, row.sigma_theoretical, p.k, p.mu, gp, cfg.power));
    row.e_sigma_sup = sup;
    row.bound_margin = detail::bound_margin(2.0 * sch.e0, e_start, sup);
    sch.rows.push_back(row);
  }
  return sch;
}

/// Result of fitting c0 so the solution bound holds over [0, T0] for every
/// member of an ensemble.
struct C0Calibration {
  double c0 = 0.0;
  bool capped = false;              ///< c0 limited by T0 <= t_cap rather than by the bound
  std::vector<double> energies;     ///< E_{sigma0}(0) per member
  std::vector<double> worst_ratio;  ///< max |u(t)|_{G} / |u0|_{G} over [0, T0] per member at the fitted c0
};

/// Largest c0 such that every member keeps |u(t)|_{G^{sigma0,1}} <= factor |u0|_{G^{sigma0,1}}
/// on [0, T0] with T0 = c0 / (1 + E0)^a <= t_cap. Each member is simulated
/// once to t_cap; the bisection runs on the recorded norm traces.
inline C0Calibration calibrate_c0(const std::vector<SpectralField>& ensemble, const ContinuationParams& p,
                                  const SolverConfig& cfg, double t_cap = 1.0, double factor = 2.0) {
  if (ensemble.empty()) throw ConfigurationError("c0 calibration needs data");
  auto run_cfg = detail::quiet(cfg);
  run_cfg.t_final = t_cap;
  const auto stride = static_cast<std::int64_t>(cfg.monitor_stride);
  const GevreyParams gp{p.sigma0, 1.0};

  C0Calibration cal;
  std::vector<std::vector<std::pair<double, double>>> traces;
  for (const auto& u0 : ensemble) {
    cal.energies.push_back(modified_energy(u0, p.sigma0, p.k, p.mu));
    const double n0 = gevrey_norm(u0, gp);
    auto& tr = traces.emplace_back();
    simulate(u0, run_cfg, {}, [&](const SimulationState& s) {
      if (s.step_count % stride == 0 || s.step_count == run_cfg.total_steps())
        tr.emplace_back(s.t, gevrey_norm(s.field, gp) / n0);
    });
  }
  auto worst = [&](double c0, std::size_t i) {
    const double t0 = c0 * std::pow(1.0 + cal.energies[i], -p.a);
    double w = 0.0;
    for (const auto& [t, r] : traces[i])
      if (t <= t0 * (1.0 + 1e-12)) w = std::max(w, r);
    return w;
  };
  auto ok = [&](double c0) {
    for (std::size_t i = 0; i < ensemble.size(); ++i)
      if (worst(c0, i) > factor) return false;
    return true;
  };

  double hi = std::numeric_limits<double>::infinity();
  for (double e : cal.energies) hi = std::min(hi, t_cap * std::pow(1.0 + e, p.a));
  if (ok(hi)) {
    cal.c0 = hi;
    cal.capped = true;
  } else {
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? lo : hi) = mid;
    }
    cal.c0 = lo;
  }
  for (std::size_t i = 0; i < ensemble.size(); ++i) cal.worst_ratio.push_back(worst(cal.c0, i));
  return cal;
}

}  // namespace gkdv
