#pragma once

// Empirical constants for the multilinear, Strichartz, Hoelder-product and
// commutator estimates. Each probe evaluates LHS / RHS over a seeded
// ensemble at a base resolution and again with N and n_time doubled (over
// doubled extents, so the same continuous packets are sampled twice as
// finely); a bounded estimate shows up as a growth factor near 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gkdv/errors.hpp"
#include "gkdv/functionals.hpp"
#include "gkdv/initial_data.hpp"
#include "gkdv/solver.hpp"
#include "gkdv/spacetime.hpp"

namespace gkdv {

struct ProbeParams {
  double s = 0.1;
  double b = 0.55;
  double eps = 0.05;
  double sigma = 0.0;
  int ensemble_size = 50;
  std::uint64_t seed = 1;

  void validate() const {
    std::vector<std::string> problems;
    if (!(eps > 0.0 && eps <= 0.1)) problems.push_back("probe.eps must lie in (0, 0.1]");
    if (!(b > 0.5 && b < 1.0)) problems.push_back("probe.b must lie in (1/2, 1)");
    if (!(sigma >= 0.0)) problems.push_back("probe.sigma must be >= 0");
    if (ensemble_size < 20) problems.push_back("probe.ensemble_size must be >= 20");
    if (!std::isfinite(s)) problems.push_back("probe.s must be finite");
    if (!problems.empty()) throw ValidationError(std::move(problems));
  }
};

/// Discretization for packet ensembles.
struct EnsembleSpec {
  double half_length = 8.0 * std::numbers::pi;
  std::size_t n_modes = 128;
  std::size_t n_time = 128;
  double t_extent = 2.0 * std::numbers::pi;
  double x_spread = 2.0 * std::numbers::pi;  ///< packet centres lie in |x0| <= x_spread
  double t_spread = 0.2 * std::numbers::pi;  ///< and |t0| <= t_spread

  GridSpec grid() const { return GridSpec(half_length, n_modes); }
  EnsembleSpec doubled() const {
    return {2.0 * half_length, 2 * n_modes, 2 * n_time, 2.0 * t_extent, x_spread, t_spread};
  }
};

/// Gaussian packet in (xi, tau) centred on tau = xi^3 + offset (on the
/// characteristic) or on a fixed tau0 (off it), truncated at four widths.
struct Packet {
  double xi0 = 0.0;
  double w_xi = 0.1;
  double w_tau = 1.0;
  double tau_shift = 0.0;  ///< offset from xi^3 (on) or the fixed centre tau0 (off)
  double x0 = 0.0;
  double t0 = 0.0;
  bool on_characteristic = true;

  double tau_centre(double xi) const { return on_characteristic ? xi * xi * xi + tau_shift : tau_shift; }
};

namespace detail {

inline constexpr double kPacketCut = 4.0;

// The packet ensemble must be reproducible per member, independent of how
// many members are drawn before it.
inline std::mt19937_64 member_rng(std::uint64_t seed, std::uint64_t member, std::uint64_t slot) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(member), static_cast<std::uint32_t>(slot)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Draw a packet whose support keeps products of `band_divisor` packets
/// alias-free on grids of `spec`.
inline Packet draw_packet(const EnsembleSpec& spec, int band_divisor, bool on_characteristic, std::uint64_t seed,
                          std::uint64_t member, std::uint64_t slot) {
  auto rng = detail::member_rng(seed, member, slot);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const GridSpec g = spec.grid();
  const double kx = g.max_wavenumber() / band_divisor;
  const double kt = std::numbers::pi * static_cast<double>(spec.n_time) / spec.t_extent / band_divisor;
  const double cut = detail::kPacketCut;

  Packet p;
  p.on_characteristic = on_characteristic;
  p.w_xi = kx / cut * (0.8 + 0.15 * unit(rng));
  p.xi0 = (kx - cut * p.w_xi) * unit(rng);
  const double xi_max = p.xi0 + cut * p.w_xi;
  const double room = kt - xi_max * xi_max * xi_max;
  if (!(room > 0.0))
    throw ConfigurationError("time-frequency band too narrow for the cubic characteristic; reduce t_extent");
  if (on_characteristic) {
    p.w_tau = room / (cut + 0.5) * (0.8 + 0.2 * unit(rng));
    p.tau_shift = 0.5 * p.w_tau * (2.0 * unit(rng) - 1.0);
  } else {
    p.w_tau = room / (2.0 * cut) * (0.8 + 0.2 * unit(rng));
    p.tau_shift = (unit(rng) < 0.5 ? -1.0 : 1.0) * (kt - cut * p.w_tau);
  }
  p.x0 = spec.x_spread * (2.0 * unit(rng) - 1.0);
  p.t0 = spec.t_spread * (2.0 * unit(rng) - 1.0);
  return p;
}

/// Real space-time field of the packet: c(xi, tau) = q(xi, tau) + conj(q(-xi, -tau)).
inline SpaceTimeField packet_field(const EnsembleSpec& spec, const Packet& p) {
  SpaceTimeField f(spec.grid(), spec.n_time, spec.t_extent);
  const GridSpec& g = f.grid();
  const double cut = detail::kPacketCut;
  auto q = [&](double xi, double tau) -> cplx {
    const double a = (xi - p.xi0) / p.w_xi;
    const double c = (tau - p.tau_centre(xi)) / p.w_tau;
    if (std::abs(a) > cut || std::abs(c) > cut) return {0.0, 0.0};
    return std::exp(-0.5 * (a * a + c * c)) * std::polar(1.0, -(xi * p.x0 + tau * p.t0));
  };
  for (std::size_t m = 0; m < f.n_time(); ++m) {
    const double tau = f.frequency(m);
    for (std::size_t i = 0; i < f.n_space(); ++i) {
      if (i == g.nyquist_index() || m == f.n_time() / 2) continue;
      const double xi = g.wavenumber(i);
      f.at(m, i) = q(xi, tau) + std::conj(q(-xi, -tau));
    }
  }
  return f;
}

struct ProbeStats {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  std::size_t n_valid = 0;     ///< members that entered the statistics
  std::size_t n_excluded = 0;  ///< 0/0 members left out
};

/// One CSV row of a probe report.
struct ProbeReport {
  std::string probe;
  int k = 0;
  double s = 0.0;
  double b = 0.0;
  double eps = 0.0;
  double sigma = 0.0;
  std::size_t n_modes = 0;
  std::size_t n_time = 0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double growth_factor = 0.0;  ///< max_ratio at doubled resolution over max_ratio at base
};

namespace detail {

/// Ratio of norms with the two conventions used by the probes: a zero
/// numerator counts as 0 when `zero_numerator_is_zero`, and 0/0 is excluded.
inline void accumulate(ProbeStats& st, double num, double den, bool zero_numerator_is_zero) {
  if (num == 0.0 && (zero_numerator_is_zero || den != 0.0)) {
    ++st.n_valid;
    return;
  }
  if (den == 0.0) {
    ++st.n_excluded;
    return;
  }
  const double r = num / den;
  st.max_ratio = std::max(st.max_ratio, r);
  st.mean_ratio += r;
  ++st.n_valid;
}

inline ProbeStats finish(ProbeStats st, const char* probe) {
  if (st.n_valid == 0 || st.max_ratio == 0.0)
    throw ProbeInvalid(std::string(probe) + ": degenerate ensemble (all ratios zero or excluded)");
  st.mean_ratio /= static_cast<double>(st.n_valid);
  return st;
}

inline bool population(std::uint64_t member, std::uint64_t slot) { return (member + slot) % 2 == 0; }

inline double spacetime_lp(const SpaceTimeField& f, int p) {
  const auto u = spacetime_inverse(f);
  double acc = 0.0;
  for (double v : u) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid().dx() * f.dt(), 1.0 / p);
}

}  // namespace detail

/// ||d/dx (u_1 ... u_{k+1})||_{X^{sigma,s,-1/2+2eps}} / prod ||u_i||_{X^{sigma,s,b}}.
/// `zeroed` lists factor slots forced to zero (used to check degenerate cases).
inline ProbeStats multilinear_ratio_probe(const EnsembleSpec& spec, const ProbeParams& params, int k,
                                          const std::vector<int>& zeroed = {}) {
  params.validate();
  if (!(params.s > (k - 4) / (2.0 * k))) throw ValidationError({"probe.s must exceed (k-4)/(2k)"});
  const double b_lhs = -0.5 + 2.0 * params.eps;
  ProbeStats st;
  for (int member = 0; member < params.ensemble_size; ++member) {
    std::vector<SpaceTimeField> fields;
    for (int slot = 0; slot <= k; ++slot) {
      const auto um = static_cast<std::uint64_t>(member), us = static_cast<std::uint64_t>(slot);
      fields.push_back(packet_field(spec, draw_packet(spec, k + 1, detail::population(um, us), params.seed, um, us)));
      if (std::find(zeroed.begin(), zeroed.end(), slot) != zeroed.end()) fields.back() *= 0.0;
    }
    std::vector<const SpaceTimeField*> ptrs;
    double rhs = 1.0;
    for (const auto& f : fields) {
      ptrs.push_back(&f);
      rhs *= xsb_norm(f, params.sigma, params.s, params.b);
    }
    const double lhs = xsb_norm(spacetime_dx(spacetime_product(ptrs)), params.sigma, params.s, b_lhs);
    detail::accumulate(st, lhs, rhs, true);
  }
  return detail::finish(st, "multilinear");
}

/// ||u||_{L^8_t L^8_x} / ||u||_{X^{0,b}} for single packets.
/// `population` selects on-characteristic (1), off (0) or the 50/50 mix (-1).
inline ProbeStats strichartz_probe(const EnsembleSpec& spec, const ProbeParams& params, int population = -1,
                                   double amplitude = 1.0) {
  params.validate();
  ProbeStats st;
  for (int member = 0; member < params.ensemble_size; ++member) {
    const auto um = static_cast<std::uint64_t>(member);
    const bool on = population < 0 ? detail::population(um, 0) : population == 1;
    // u^8 is integrated exactly when the support fits in a quarter band.
    auto f = packet_field(spec, draw_packet(spec, 5, on, params.seed, um, 0));
    f *= amplitude;
    detail::accumulate(st, detail::spacetime_lp(f, 8), xsb_norm(f, 0.0, 0.0, params.b), false);
  }
  return detail::finish(st, "strichartz");
}

/// ||u_1 ... u_{k+1}||_{L^2 L^2} / (prod_{i<=k-3} ||u_i||_{X^{1/2+eps,b}} prod_{i>k-3} ||u_i||_{X^{0,b}}).
inline ProbeStats product_holder_probe(const EnsembleSpec& spec, const ProbeParams& params, int k,
                                       const std::vector<int>& zeroed = {}) {
  params.validate();
  if (k < 4) throw ValidationError({"Hoelder product probe needs k >= 4"});
  ProbeStats st;
  for (int member = 0; member < params.ensemble_size; ++member) {
    std::vector<SpaceTimeField> fields;
    double rhs = 1.0;
    for (int slot = 0; slot <= k; ++slot) {
      const auto um = static_cast<std::uint64_t>(member), us = static_cast<std::uint64_t>(slot);
      fields.push_back(packet_field(spec, draw_packet(spec, k + 1, detail::population(um, us), params.seed, um, us)));
      if (std::find(zeroed.begin(), zeroed.end(), slot) != zeroed.end()) fields.back() *= 0.0;
      const double s = slot < k - 3 ? 0.5 + params.eps : 0.0;
      rhs *= xsb_norm(fields.back(), 0.0, s, params.b);
    }
    std::vector<const SpaceTimeField*> ptrs;
    for (const auto& f : fields) ptrs.push_back(&f);
    detail::accumulate(st, spacetime_l2(spacetime_product(ptrs)), rhs, true);
  }
  return detail::finish(st, "holder");
}

/// ||chi u||_{X^{0,b}} / ||u||_{X^{0,b}} with chi the indicator of |t| < half_width.
inline ProbeStats window_ratio_probe(const EnsembleSpec& spec, const ProbeParams& params, double half_width = 0.5,
                                     double b = 0.4) {
  params.validate();
  ProbeStats st;
  for (int member = 0; member < params.ensemble_size; ++member) {
    const auto um = static_cast<std::uint64_t>(member);
    const auto f = packet_field(spec, draw_packet(spec, 5, detail::population(um, 0), params.seed, um, 0));
    auto u = spacetime_inverse(f);
    for (std::size_t m = 0; m < f.n_time(); ++m) {
      if (std::abs(f.t(m)) < half_width) continue;
      std::fill_n(u.begin() + static_cast<std::ptrdiff_t>(m * f.n_space()), f.n_space(), 0.0);
    }
    const auto windowed = spacetime_forward(u, f.grid(), f.n_time(), f.t_extent());
    detail::accumulate(st, xsb_norm(windowed, 0.0, 0.0, b), xsb_norm(f, 0.0, 0.0, b), false);
  }
  return detail::finish(st, "window");
}

/// Discretization for the commutator probe: a simulation from random
/// analytic data over [0, t_window], sampled at n_time nodes of a centred
/// window of twice that length and tapered by a smooth bump.
struct FProbeSpec {
  double half_length = 8.0 * std::numbers::pi;
  std::size_t n_modes = 128;
  std::size_t n_time = 64;
  double t_window = 1.0;
  int substeps = 32;  ///< solver steps per time node
  double amplitude = 0.5;
  double decay = 1.5;

  FProbeSpec doubled() const {
    FProbeSpec d = *this;
    d.n_modes *= 2;
    d.n_time *= 2;
    d.substeps = std::max(1, substeps / 2);
    return d;
  }
};

/// C-infinity bump on [0, t_window], equal to 1 at the centre.
inline double smooth_bump(double s, double t_window) {
  const double y = 2.0 * s / t_window - 1.0;
  if (std::abs(y) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

/// sup over sigma of ||psi F(U)||_{L^2 L^2} / (sigma^alpha ||psi U||^{k+1}_{X^{1,b}}) per member.
/// sigma = 0 gives F = 0 and the ratio is defined as 0.
inline ProbeStats f_bound_probe(const FProbeSpec& spec, const std::vector<double>& sigmas, double alpha, int k,
                                const ProbeParams& params) {
  params.validate();
  if (!(alpha >= 0.0 && alpha < (k + 4) / (2.0 * k))) throw ValidationError({"alpha must lie in [0, (k+4)/(2k))"});
  const double t_extent = 2.0 * spec.t_window;
  const double dt_node = t_extent / static_cast<double>(spec.n_time);
  SolverConfig cfg;
  cfg.k = k;
  cfg.mu = -1;
  cfg.grid = GridSpec(spec.half_length, spec.n_modes);
  cfg.dt = dt_node / spec.substeps;
  cfg.t_final = spec.t_window;
  cfg.monitor_stride = static_cast<int>(std::max<std::int64_t>(1, cfg.total_steps()));

  ProbeStats st;
  for (int member = 0; member < params.ensemble_size; ++member) {
    const auto u0 = random_analytic_data(cfg.grid, params.seed + static_cast<std::uint64_t>(member), spec.amplitude,
                                         spec.decay);
    // Node m sits at simulation time t_m + t_window / 2, a whole number of steps.
    std::vector<SpectralField> snaps(spec.n_time, SpectralField(cfg.grid));
    std::vector<double> window(spec.n_time, 0.0);
    const auto offset = static_cast<std::int64_t>(spec.n_time / 4);
    simulate(u0, cfg, {}, [&](const SimulationState& s) {
      if (s.step_count % spec.substeps != 0) return;
      const std::int64_t m = s.step_count / spec.substeps + offset;
      if (m < 0 || m >= static_cast<std::int64_t>(spec.n_time)) return;
      snaps[static_cast<std::size_t>(m)] = s.field;
      window[static_cast<std::size_t>(m)] = smooth_bump(s.t, spec.t_window);
    });

    double best = 0.0;
    bool any = false;
    for (double sigma : sigmas) {
      if (sigma == 0.0) {
        any = true;
        continue;
      }
      double f2 = 0.0;
      std::vector<SpectralField> weighted;
      for (std::size_t m = 0; m < spec.n_time; ++m) {
        weighted.push_back(window[m] == 0.0 ? snaps[m] : exp_multiplier(snaps[m], sigma));
        if (window[m] == 0.0) continue;
        const auto f = commutator_remainder(snaps[m], sigma, k, cfg.mu, {}, cfg.power);
        f2 += window[m] * window[m] * inner_product(f, f) * dt_node;
      }
      const auto big_u = assemble_snapshots(weighted, window, spec.n_time, t_extent);
      const double rhs = std::pow(sigma, alpha) * std::pow(xsb_norm(big_u, 0.0, 1.0, params.b), k + 1);
      if (rhs > 0.0) {
        best = std::max(best, std::sqrt(f2) / rhs);
        any = true;
      }
    }
    if (any) detail::accumulate(st, best, 1.0, true);
  }
  return detail::finish(st, "f-bound");
}

/// Growth factor of a probe under doubling.
inline double growth_factor(const ProbeStats& base, const ProbeStats& fine) { return fine.max_ratio / base.max_ratio; }

inline ProbeReport make_report(std::string probe, int k, const ProbeParams& params, std::size_t n_modes,
                               std::size_t n_time, const ProbeStats& base, const ProbeStats& fine) {
  return {std::move(probe), k,        params.s,       params.b,        params.eps,
          params.sigma,     n_modes,  n_time,         base.max_ratio,  base.mean_ratio,
          growth_factor(base, fine)};
}

}  // namespace gkdv
