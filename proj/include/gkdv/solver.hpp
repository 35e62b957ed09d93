#pragma once

// Time integration of u_t + u_xxx + mu u^k u_x = 0 on the periodic grid.
//
// The stiff linear part is removed with the integrating factor W(-t) and
// the transformed system is advanced with classical RK4 (Lawson scheme):
// the Airy flow is applied exactly, only the nonlinear increment is
// approximated.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/functionals.hpp"
#include "gkdv/gevrey.hpp"
#include "gkdv/spectral.hpp"

namespace gkdv {

enum class Nonlinearity {
  conservative,    ///< mu/(k+1) d/dx(u^{k+1})
  skew_symmetric,  ///< mu/(k+2) [d/dx(u^{k+1}) + u^k u_x]
};

struct SolverConfig {
  int k = 4;
  int mu = -1;
  double dt = 1e-3;
  double t_final = 1.0;
  GridSpec grid = GridSpec::standard();
  int monitor_stride = 10;
  double noise_floor = 1e-13;  ///< coefficient level at or below which a field counts as zero
  Nonlinearity form = Nonlinearity::conservative;
  PowerOptions power{};

  std::int64_t total_steps() const { return std::llround(t_final / dt); }

  void validate() const {
    std::vector<std::string> problems;
    if (k < 2) problems.push_back("solver.k must be an integer >= 2");
    if (mu != 1 && mu != -1) problems.push_back("solver.mu must be +1 or -1");
    if (!(dt > 0.0) || !(dt <= 0.1)) problems.push_back("solver.dt must lie in (0, 0.1]");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) problems.push_back("solver.t_final must be >= 0");
    if (monitor_stride < 1) problems.push_back("solver.monitor_stride must be >= 1");
    if (!(noise_floor > 0.0 && noise_floor < 1.0)) problems.push_back("solver.noise_floor must lie in (0, 1)");
    if (!problems.empty()) throw ValidationError(std::move(problems));
  }
};

struct SimulationState {
  double t = 0.0;
  SpectralField field;
  std::int64_t step_count = 0;
};

/// Diagnostics row. radius_estimate is +inf for superexponential decay and
/// NaN when the estimator has too few modes to fit.
struct TraceRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double e_sigma = 0.0;
  double radius_estimate = 0.0;
  double linf = 0.0;
};

/// Non-finite coefficients appeared. Carries the last finite state and any
/// trace recorded before the failure.
class BlowUpError : public Error {
 public:
  BlowUpError(SimulationState last, double t_fail)
      : Error("solution blew up at t = " + std::to_string(t_fail) + " (last finite state at t = " +
              std::to_string(last.t) + ")"),
        last_(std::move(last)),
        t_fail_(t_fail) {}
  const SimulationState& last_state() const noexcept { return last_; }
  double failure_time() const noexcept { return t_fail_; }
  const std::vector<TraceRecord>& partial_trace() const noexcept { return trace_; }
  void attach_trace(std::vector<TraceRecord> trace) { trace_ = std::move(trace); }

 private:
  SimulationState last_;
  double t_fail_;
  std::vector<TraceRecord> trace_;
};

/// Integrating-factor RK4 stepper with the Airy multipliers precomputed.
class Stepper {
 public:
  Stepper(const SolverConfig& cfg, double dt) : cfg_(cfg), dt_(dt), half_(cfg.grid.size()), full_(cfg.grid.size()) {
    const GridSpec& g = cfg.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i == g.nyquist_index()) {
        half_[i] = full_[i] = cplx{1.0, 0.0};
        continue;
      }
      const double xi = g.wavenumber(i);
      const double c3 = xi * xi * xi;
      half_[i] = std::polar(1.0, 0.5 * dt * c3);
      full_[i] = std::polar(1.0, dt * c3);
    }
  }
  explicit Stepper(const SolverConfig& cfg) : Stepper(cfg, cfg.dt) {}

  double dt() const noexcept { return dt_; }

  /// Time derivative of u from the nonlinear term alone.
  SpectralField nonlinear(const SpectralField& u) const {
    const int k = cfg_.k;
    const double mu = static_cast<double>(cfg_.mu);
    SpectralField flux = spectral_derivative(dealiased_power(u, k + 1, cfg_.power), 1);
    if (cfg_.form == Nonlinearity::conservative) return (-mu / static_cast<double>(k + 1)) * flux;
    const SpectralField ux = spectral_derivative(u, 1);
    flux += dealiased_product(ux, u, k, cfg_.power);
    return (-mu / static_cast<double>(k + 2)) * flux;
  }

  SimulationState advance(const SimulationState& s) const {
    const SpectralField& u = s.field;
    const double h = dt_;
    const SpectralField k1 = nonlinear(u);
    const SpectralField k2 = nonlinear(mul(half_, axpy(u, 0.5 * h, k1)));
    const SpectralField k3 = nonlinear(axpy(mul(half_, u), 0.5 * h, k2));
    const SpectralField k4 = nonlinear(axpy(mul(full_, u), h, mul(half_, k3)));
    SpectralField next(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
      next[i] = full_[i] * u[i] + (h / 6.0) * (full_[i] * k1[i] + 2.0 * half_[i] * (k2[i] + k3[i]) + k4[i]);
    }
    const std::int64_t dir = h > 0.0 ? 1 : -1;
    SimulationState out{0.0, std::move(next), s.step_count + dir};
    out.t = static_cast<double>(out.step_count) * std::abs(h);
    if (!out.field.all_finite()) throw BlowUpError(s, out.t);
    return out;
  }

 private:
  static SpectralField mul(const std::vector<cplx>& m, const SpectralField& a) {
    SpectralField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = m[i] * a[i];
    return out;
  }
  static SpectralField axpy(const SpectralField& y, double a, const SpectralField& x) {
    SpectralField out(y.grid());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * x[i];
    return out;
  }

  SolverConfig cfg_;
  double dt_;
  std::vector<cplx> half_;
  std::vector<cplx> full_;
};

/// One step of size cfg.dt.
inline SimulationState step(const SimulationState& state, const SolverConfig& cfg) {
  return Stepper(cfg).advance(state);
}

inline double linf_norm(const SpectralField& u) {
  double m = 0.0;
  for (double v : inverse_transform(u)) m = std::max(m, std::abs(v));
  return m;
}

/// Diagnostics row for one state.
inline TraceRecord make_record(const SimulationState& s, const SolverConfig& cfg, const GevreyParams& gevrey) {
  TraceRecord r;
  r.t = s.t;
  r.mass = mass(s.field);
  r.energy = energy(s.field, cfg.k, cfg.mu, cfg.power);
  r.e_sigma = modified_energy(s.field, gevrey.sigma, cfg.k, cfg.mu, gevrey, cfg.power);
  r.linf = linf_norm(s.field);
  r.radius_estimate = std::numeric_limits<double>::quiet_NaN();
  if (s.field.max_abs() > cfg.noise_floor) {
    try {
      r.radius_estimate = estimate_radius(s.field, gevrey);
    } catch (const InsufficientResolution&) {
    }
  }
  if (!std::isfinite(r.mass) || !std::isfinite(r.energy) || !std::isfinite(r.e_sigma) || !std::isfinite(r.linf))
    throw IntegrityError("non-finite diagnostics at t = " + std::to_string(s.t));
  return r;
}

/// Called with every state the integrator visits, starting state included.
using StateObserver = std::function<void(const SimulationState&)>;

struct SimulationResult {
  std::vector<TraceRecord> trace;
  SimulationState final_state;
};

/// Checks that do not depend on the time step count.
inline void check_start(const SpectralField& u0, const SolverConfig& cfg) {
  cfg.validate();
  if (!(u0.grid() == cfg.grid)) throw ConfigurationError("initial field grid does not match solver grid");
  if (!u0.all_finite()) throw ConfigurationError("initial field has non-finite coefficients");
  if (hermitian_defect(u0) > kHermitianTolerance) throw ConfigurationError("initial field is not real");
  const double cfl = cfg.dt * linf_norm(u0) * cfg.grid.max_wavenumber();
  if (cfl > 1.0)
    throw ConfigurationError("dt * max|u| * max|xi| = " + std::to_string(cfl) + " exceeds the sanity bound 1");
}

/// Advance `start` by n_steps steps. Records are taken whenever the global
/// step count is a multiple of monitor_stride, so splitting a run into
/// consecutive chunks reproduces the unsplit trace and final state bit for
/// bit. The starting state is recorded only if `record_start` is set.
inline SimulationResult simulate_steps(const SimulationState& start, std::int64_t n_steps, const SolverConfig& cfg,
                                       const GevreyParams& gevrey, const StateObserver& observer = {},
                                       bool record_start = true) {
  const Stepper stepper(cfg);
  SimulationResult res{{}, start};
  const auto stride = static_cast<std::int64_t>(cfg.monitor_stride);
  if (observer) observer(res.final_state);
  if (record_start && res.final_state.step_count % stride == 0)
    res.trace.push_back(make_record(res.final_state, cfg, gevrey));
  for (std::int64_t n = 0; n < n_steps; ++n) {
    try {
      res.final_state = stepper.advance(res.final_state);
    } catch (BlowUpError& e) {
      e.attach_trace(std::move(res.trace));
      throw;
    }
    if (observer) observer(res.final_state);
    if (res.final_state.step_count % stride == 0) res.trace.push_back(make_record(res.final_state, cfg, gevrey));
  }
  return res;
}

/// Run from u0 at t = 0 to cfg.t_final.
inline SimulationResult simulate(const SpectralField& u0, const SolverConfig& cfg, const GevreyParams& gevrey,
                                 const StateObserver& observer = {}) {
  check_start(u0, cfg);
  gevrey.validate();
  return simulate_steps(SimulationState{0.0, u0, 0}, cfg.total_steps(), cfg, gevrey, observer);
}

/// Traveling wave of the focusing equation (mu = +1):
///   u = [c (k+1)(k+2) / 2]^{1/k} sech^{2/k}( k sqrt(c) (x - c t - x0) / 2 ),
/// sampled on the grid with the argument wrapped into [-L, L).
inline SpectralField soliton_exact(int k, double c, double x0, double t, const GridSpec& grid) {
  if (!(c > 0.0)) throw ConfigurationError("soliton speed c must be positive");
  if (k < 1) throw ConfigurationError("soliton power k must be >= 1");
  const double amp = std::pow(c * (k + 1) * (k + 2) / 2.0, 1.0 / k);
  const double width = static_cast<double>(k) * std::sqrt(c) / 2.0;
  const double period = 2.0 * grid.half_length();
  std::vector<double> u(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    double y = grid.x(n) - c * t - x0;
    y -= period * std::floor((y + grid.half_length()) / period);
    u[n] = amp * std::pow(1.0 / std::cosh(width * y), 2.0 / k);
  }
  return forward_transform(u, grid);
}

}  // namespace gkdv
