#pragma once

// Experiment execution and artifacts. A run writes metadata.json and the
// tables of its experiment into one directory:
//
//   simulate      trace
//   radius        trace, radius
//   energy        trace, energy
//   sweep         trace, sigma_sweep
//   probe         probes
//   continuation  trace, sigma_sweep (when C is fitted), schedule, induction
//
// metadata.json is written last, on failure too; it holds the resolved
// configuration, library versions, seed, exit status, table schemas, the
// experiment's scalar results and a `partial` flag set when a table was cut
// short. No timestamps or paths are recorded, so identical configurations
// give byte-identical directories.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <fftw3.h>
#include <nlohmann/json.hpp>

#include "gkdv/continuation.hpp"
#include "gkdv/energy.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/gevrey.hpp"
#include "gkdv/harness/config.hpp"
#include "gkdv/harness/table.hpp"
#include "gkdv/initial_data.hpp"
#include "gkdv/probes.hpp"
#include "gkdv/solver.hpp"

#ifndef GKDV_VERSION
#define GKDV_VERSION "unknown"
#endif

namespace gkdv::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitBlowUp = 3,
  kExitAnalyticity = 4,
  kExitResource = 5,
};

inline const char* status_name(int code) {
  switch (code) {
    case kExitOk: return "ok";
    case kExitValidation: return "validation";
    case kExitBlowUp: return "blow-up";
    case kExitAnalyticity: return "analyticity-exceeded";
    case kExitResource: return "resource";
    default: return "error";
  }
}

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::string> artifacts;  ///< file names inside the output directory
  nlohmann::ordered_json results;      ///< scalar results, as in metadata.json
};

inline SpectralField make_initial(const ExperimentConfig& c) {
  const auto& in = c.initial;
  const GridSpec& g = c.solver.grid;
  if (in.kind == "soliton") return soliton_exact(c.solver.k, in.speed, in.x0, 0.0, g);
  if (in.kind == "sech") return sech_data(g, in.amplitude, in.width, in.x0);
  if (in.kind == "gaussian") return gaussian_data(g, in.amplitude, in.width, in.x0);
  return random_analytic_data(g, in.seed, in.amplitude, in.decay);
}

/// Radius of analyticity of the initial function on the line.
inline double exact_initial_radius(const ExperimentConfig& c) {
  const auto& in = c.initial;
  if (in.kind == "soliton") return std::numbers::pi / (c.solver.k * std::sqrt(in.speed));
  if (in.kind == "sech") return 0.5 * std::numbers::pi * in.width;
  if (in.kind == "gaussian") return std::numeric_limits<double>::infinity();
  return in.decay;
}

inline Table trace_table(const std::vector<TraceRecord>& trace, const std::vector<double>& residual = {}) {
  Table t{"trace", 1, {"t", "mass", "energy", "e_sigma", "radius_est", "linf", "identity_residual"}, {}};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    const double res = i < residual.size() ? residual[i] : std::numeric_limits<double>::quiet_NaN();
    t.add({r.t, r.mass, r.energy, r.e_sigma, r.radius_estimate, r.linf, res});
  }
  return t;
}

inline Table sweep_table(const SweepResult& s) {
  Table t{"sigma_sweep", 1, {"sigma", "drift", "e_sigma0", "drift_fit"}, {}};
  for (const auto& r : s.rows) t.add({r.sigma, r.drift, r.e_sigma0, std::exp(s.intercept) * std::pow(r.sigma, s.slope)});
  return t;
}

namespace detail {

inline nlohmann::ordered_json jreal(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

inline nlohmann::ordered_json jvalue(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* d = std::get_if<double>(&v)) return jreal(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<bool>(v);
}

inline nlohmann::ordered_json versions() {
  nlohmann::ordered_json v;
  v["gkdv"] = GKDV_VERSION;
  v["fftw"] = std::string(fftw_version);
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

/// Mutable state of one run: the tables written so far and the results.
struct Run {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  RunResult result;
  std::vector<std::string> schemas;
  bool partial = false;

  void emit(const Table& t) {
    result.artifacts.push_back(write_table(dir, t, cfg.format == OutputFormat::json));
    schemas.push_back(t.schema());
  }
  nlohmann::ordered_json& out() { return result.results; }
};

inline SimulationResult simulate_or_flush(Run& run, const SpectralField& u0, const SolverConfig& solver,
                                          const GevreyParams& gevrey, const StateObserver& observer = {}) {
  try {
    return simulate(u0, solver, gevrey, observer);
  } catch (const BlowUpError& e) {
    run.partial = true;
    run.emit(trace_table(e.partial_trace()));
    throw;
  }
}

inline void drift_summary(Run& run, const std::vector<TraceRecord>& trace) {
  const auto& f = trace.front();
  double dm = 0.0, de = 0.0;
  for (const auto& r : trace) {
    dm = std::max(dm, std::abs(r.mass - f.mass));
    de = std::max(de, std::abs(r.energy - f.energy));
  }
  run.out()["records"] = trace.size();
  run.out()["t_end"] = jreal(trace.back().t);
  run.out()["mass_drift_abs"] = jreal(dm);
  run.out()["energy_drift_abs"] = jreal(de);
  run.out()["mass_drift_rel"] = jreal(f.mass > 0.0 ? dm / f.mass : 0.0);
  run.out()["energy_drift_rel"] = jreal(f.energy != 0.0 ? de / std::abs(f.energy) : 0.0);
}

inline void run_simulate(Run& run) {
  const auto& c = run.cfg;
  const auto res = simulate_or_flush(run, make_initial(c), c.solver, c.gevrey);
  run.emit(trace_table(res.trace));
  drift_summary(run, res.trace);
  if (c.initial.kind == "soliton") {
    const auto exact = soliton_exact(c.solver.k, c.initial.speed, c.initial.x0, res.final_state.t, c.solver.grid);
    run.out()["soliton_rel_l2_error"] = jreal(l2_norm(res.final_state.field - exact) / l2_norm(exact));
  }
}

inline void run_radius(Run& run) {
  const auto& c = run.cfg;
  Table fits{"radius", 1, {"t", "radius_est", "decay_rate", "fit_max_residual", "curvature", "n_points",
                           "superexponential"}, {}};
  const auto stride = static_cast<std::int64_t>(c.solver.monitor_stride);
  const auto observer = [&](const SimulationState& s) {
    if (s.step_count % stride != 0) return;
    if (!(s.field.max_abs() > c.solver.noise_floor)) return;
    try {
      const DecayFit f = fit_decay(s.field, c.gevrey);
      const double r = f.superexponential ? std::numeric_limits<double>::infinity() : f.sigma;
      fits.add({s.t, r, f.sigma, f.max_residual, f.curvature, static_cast<std::int64_t>(f.n_points),
                static_cast<std::int64_t>(f.superexponential)});
    } catch (const InsufficientResolution&) {
    }
  };
  const auto res = simulate_or_flush(run, make_initial(c), c.solver, c.gevrey, observer);
  run.emit(trace_table(res.trace));
  run.emit(fits);
  drift_summary(run, res.trace);
  run.out()["initial_radius_exact"] = jreal(exact_initial_radius(c));
  run.out()["initial_radius_est"] = jreal(res.trace.front().radius_estimate);
  run.out()["final_radius_est"] = jreal(res.trace.back().radius_estimate);
}

inline void run_energy(Run& run) {
  const auto& c = run.cfg;
  EnergyRun er = [&] {
    try {
      return run_energy_identity(make_initial(c), c.solver, c.gevrey);
    } catch (const BlowUpError& e) {
      run.partial = true;
      run.emit(trace_table(e.partial_trace()));
      throw;
    }
  }();
  std::vector<double> residual;
  for (const auto& r : er.result.trace) {
    const auto it = std::find_if(er.reports.begin(), er.reports.end(), [&](const EnergyReport& e) { return e.t == r.t; });
    residual.push_back(it == er.reports.end() ? std::numeric_limits<double>::quiet_NaN() : it->identity_residual);
  }
  run.emit(trace_table(er.result.trace, residual));
  Table t{"energy", 1, {"t", "mass", "energy", "e_sigma", "r_sigma", "identity_residual", "quadrature_error"}, {}};
  double worst = 0.0;
  bool within = true;
  for (const auto& r : er.reports) {
    t.add({r.t, r.mass, r.energy, r.e_sigma, r.r_sigma, r.identity_residual, r.quadrature_error});
    within = within && r.identity_residual <= 10.0 * r.quadrature_error;
    if (r.quadrature_error > 0.0) worst = std::max(worst, r.identity_residual / r.quadrature_error);
  }
  run.emit(t);
  drift_summary(run, er.result.trace);
  run.out()["sigma"] = jreal(c.gevrey.sigma);
  run.out()["max_residual_over_quadrature"] = jreal(worst);
  run.out()["identity_within_10x"] = within;
  if (c.gevrey.sigma == 0.0) {
    // E_0 = M + E: report sup_t |E_0(t) - (M + E)(0)| / (M + E)(0).
    double collapse = 0.0;
    const auto& f = er.reports.front();
    for (const auto& r : er.reports) collapse = std::max(collapse, std::abs(r.e_sigma - (f.mass + f.energy)));
    run.out()["sigma0_collapse_rel"] = jreal(collapse / (f.mass + f.energy));
  }
}

inline double default_sigma_top(const SpectralField& u0) {
  const double r0 = estimate_radius(u0, {});
  return std::isfinite(r0) && r0 > 0.0 ? 0.5 * r0 : 1.0;
}

inline void run_sweep(Run& run) {
  const auto& c = run.cfg;
  const auto u0 = make_initial(c);
  const double top = c.sweep.sigma_top > 0.0 ? c.sweep.sigma_top : default_sigma_top(u0);
  const auto sigmas = log_spaced_sigmas(top, c.sweep.n_sigmas, c.sweep.decades);
  const auto sw = almost_conservation_sweep(u0, c.solver, sigmas, c.gevrey);
  run.emit(trace_table(sw.trace));
  run.emit(sweep_table(sw));
  drift_summary(run, sw.trace);
  run.out()["sigma_top"] = jreal(top);
  run.out()["slope"] = jreal(sw.slope);
  run.out()["intercept"] = jreal(sw.intercept);
  run.out()["alpha_limit"] = jreal((c.solver.k + 4) / (2.0 * c.solver.k));
}

inline bool probe_selected(const ExperimentConfig& c, const char* name) {
  return c.probe.kind == "all" || c.probe.kind == name;
}

inline void run_probe(Run& run) {
  const auto& c = run.cfg;
  const int k = c.solver.k;
  const auto& params = c.probe.params;
  const EnsembleSpec base = c.probe.ensemble, fine = base.doubled();
  Table t{"probes", 1, {"probe", "k", "s", "b", "eps", "sigma", "N", "n_time", "max_ratio", "mean_ratio",
                        "growth_factor"}, {}};
  double worst = 0.0;
  auto add = [&](const ProbeReport& r) {
    t.add({r.probe, static_cast<std::int64_t>(r.k), r.s, r.b, r.eps, r.sigma, static_cast<std::int64_t>(r.n_modes),
           static_cast<std::int64_t>(r.n_time), r.max_ratio, r.mean_ratio, r.growth_factor});
    worst = std::max(worst, r.growth_factor);
  };
  if (probe_selected(c, "multilinear"))
    add(make_report("multilinear", k, params, base.n_modes, base.n_time, multilinear_ratio_probe(base, params, k),
                    multilinear_ratio_probe(fine, params, k)));
  if (probe_selected(c, "strichartz"))
    add(make_report("strichartz", 0, params, base.n_modes, base.n_time, strichartz_probe(base, params),
                    strichartz_probe(fine, params)));
  if (probe_selected(c, "holder"))
    add(make_report("holder", k, params, base.n_modes, base.n_time, product_holder_probe(base, params, k),
                    product_holder_probe(fine, params, k)));
  if (probe_selected(c, "window"))
    add(make_report("window", 0, params, base.n_modes, base.n_time, window_ratio_probe(base, params),
                    window_ratio_probe(fine, params)));
  if (probe_selected(c, "f-bound")) {
    const double alpha = c.probe.alpha > 0.0 ? c.probe.alpha : (k + 4) / (2.0 * k) - 0.05;
    const auto sigmas = log_spaced_sigmas(c.probe.sigma_top, c.probe.n_sigmas, 2.0);
    auto fp = params;
    fp.ensemble_size = c.probe.f_ensemble_size;
    const FProbeSpec fb = c.probe.f, ff = fb.doubled();
    add(make_report("f-bound", k, fp, fb.n_modes, fb.n_time, f_bound_probe(fb, sigmas, alpha, k, fp),
                    f_bound_probe(ff, sigmas, alpha, k, fp)));
    run.out()["f_bound_alpha"] = jreal(alpha);
  }
  run.emit(t);
  run.out()["max_growth_factor"] = jreal(worst);
}

inline void run_continuation(Run& run) {
  const auto& c = run.cfg;
  const auto& cs = c.continuation;
  const auto u0 = make_initial(c);
  ContinuationParams p = cs.params;
  p.k = c.solver.k;
  p.mu = c.solver.mu;

  const double r0 = estimate_radius(u0, {});
  if (p.sigma0 == 0.0) p.sigma0 = std::isfinite(r0) && r0 > 0.0 ? 0.5 * r0 : 1.0;
  run.out()["r0_est"] = jreal(r0);
  run.out()["sigma0"] = jreal(p.sigma0);

  if (p.c_ac == 0.0) {
    const auto sigmas = log_spaced_sigmas(p.sigma0, c.sweep.n_sigmas, c.sweep.decades);
    const auto sw = almost_conservation_sweep(u0, c.solver, sigmas, {});
    run.emit(sweep_table(sw));
    p.c_ac = cs.c_ac_safety * fitted_almost_conservation_constant(sw, p.alpha, p.k);
    run.out()["sweep_slope"] = jreal(sw.slope);
  }
  run.out()["c_ac"] = jreal(p.c_ac);

  if (p.c0 == 0.0) {
    std::vector<SpectralField> ensemble;
    for (int i = 0; i < cs.calibration_members; ++i)
      ensemble.push_back(random_analytic_data(c.solver.grid, c.initial.seed + 1 + static_cast<std::uint64_t>(i),
                                              c.initial.amplitude, c.initial.decay));
    const auto cal = calibrate_c0(ensemble, p, c.solver);
    p.c0 = cal.c0;
    run.out()["c0_capped"] = cal.capped;
  }
  run.out()["c0"] = jreal(p.c0);
  p.validate();

  const auto trace = detail::simulate_or_flush(run, u0, c.solver, GevreyParams{p.sigma0});
  run.emit(trace_table(trace.trace));

  const double e0 = modified_energy(u0, p.sigma0, p.k, p.mu);
  const auto sch = envelope_vs_measured(u0, doubling_times(energy_timespan(e0, p), cs.envelope_points), p, c.solver);
  Table st{"schedule", 1, {"T", "sigma_theoretical", "sigma_measured", "delta", "n_steps", "E_sigma_sup",
                           "bound_margin"}, {}};
  bool envelope_ok = true;
  for (const auto& r : sch.rows) {
    st.add({r.t, r.sigma_theoretical, r.sigma_measured, r.delta, r.n_steps, r.e_sigma_sup, r.bound_margin});
    envelope_ok = envelope_ok && r.sigma_measured >= r.sigma_theoretical;
  }
  run.emit(st);

  const auto ind = iterate_energy_induction(u0, cs.induction_intervals * sch.delta, p, c.solver);
  Table it{"induction", 1, {"j", "t", "e_sigma_sup", "energy_bound", "objective_bound", "margin", "holds"}, {}};
  for (const auto& s : ind.steps)
    it.add({static_cast<std::int64_t>(s.j), s.t, s.e_sigma_sup, s.energy_bound, s.objective_bound, s.margin,
            static_cast<std::int64_t>(s.holds)});
  run.emit(it);

  run.out()["e0"] = jreal(sch.e0);
  run.out()["t0"] = jreal(sch.t0);
  run.out()["delta"] = jreal(sch.delta);
  run.out()["c1"] = jreal(sch.c1);
  run.out()["calibration"] = jreal(sch.calibration);
  run.out()["envelope_holds"] = envelope_ok;
  run.out()["induction_sigma"] = jreal(ind.sigma);
  run.out()["induction_holds"] = ind.holds();
  run.out()["induction_margin"] = jreal(ind.row.bound_margin);
}

inline int classify(std::string& message) {
  try {
    throw;
  } catch (const ValidationError& e) {
    message = e.what();
    return kExitValidation;
  } catch (const ConfigurationError& e) {
    message = e.what();
    return kExitValidation;
  } catch (const BlowUpError& e) {
    message = e.what();
    return kExitBlowUp;
  } catch (const AnalyticityExceeded& e) {
    message = e.what();
    return kExitAnalyticity;
  } catch (const ResourceError& e) {
    message = e.what();
    return kExitResource;
  } catch (const std::exception& e) {
    message = e.what();
    return kExitFailure;
  }
}

}  // namespace detail

/// Run the experiment of a parsed config into `dir` (created if missing).
/// Never throws for failures of the computation; they become exit codes.
inline RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  detail::Run run{cfg, dir, {}, {}, false};
  if (auto problems = validate_config(cfg); !problems.empty()) {
    run.result.exit_code = kExitValidation;
    run.result.message = ValidationError(problems).what();
    return run.result;
  }
  std::filesystem::create_directories(dir);
  try {
    switch (cfg.kind) {
      case ExperimentKind::simulate: detail::run_simulate(run); break;
      case ExperimentKind::radius: detail::run_radius(run); break;
      case ExperimentKind::energy: detail::run_energy(run); break;
      case ExperimentKind::sweep: detail::run_sweep(run); break;
      case ExperimentKind::probe: detail::run_probe(run); break;
      case ExperimentKind::continuation: detail::run_continuation(run); break;
    }
  } catch (...) {
    run.result.exit_code = detail::classify(run.result.message);
    run.partial = run.partial || !run.result.artifacts.empty();
  }

  nlohmann::ordered_json meta;
  meta["experiment"] = to_string(cfg.kind);
  meta["status"] = status_name(run.result.exit_code);
  meta["exit_code"] = run.result.exit_code;
  meta["message"] = run.result.message;
  meta["partial"] = run.partial;
  meta["seed"] = cfg.initial.seed;
  meta["probe_seed"] = cfg.probe.params.seed;
  meta["versions"] = detail::versions();
  nlohmann::ordered_json schemas = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < run.schemas.size(); ++i) schemas[run.result.artifacts[i]] = run.schemas[i];
  meta["tables"] = schemas;
  nlohmann::ordered_json resolved = nlohmann::ordered_json::object();
  for (const auto& [path, value] : resolved_entries(cfg))
    if (path != "output_dir") resolved[path] = detail::jvalue(value);
  meta["config"] = resolved;
  meta["results"] = run.result.results.is_null() ? nlohmann::ordered_json::object() : run.result.results;
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
  run.result.artifacts.push_back("metadata.json");
  return run.result;
}

}  // namespace gkdv::harness
