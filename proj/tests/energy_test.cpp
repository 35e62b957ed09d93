#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gkdv/energy.hpp"
#include "gkdv/initial_data.hpp"

using namespace gkdv;

namespace {

SolverConfig identity_config(std::size_t n = 512) {
  SolverConfig cfg;
  cfg.k = 4;
  cfg.mu = -1;
  cfg.grid = GridSpec::standard(n);
  cfg.dt = 1e-3;
  cfg.t_final = 0.5;
  cfg.monitor_stride = 2;
  return cfg;
}

}  // namespace

TEST(RemainderIntegral, VanishesAtSigmaZero) {
  const auto cfg = identity_config(256);
  std::vector<SimulationState> states;
  simulate(random_analytic_data(cfg.grid, 1, 0.5), cfg, {}, [&](const SimulationState& s) { states.push_back(s); });
  for (double r : remainder_integral(states, 0.0, 4, -1)) EXPECT_EQ(r, 0.0);
}

TEST(EnergyReports, NeedsOddSampleCount) {
  const GridSpec g(3.0, 16);
  std::vector<SimulationState> two{{0.0, SpectralField(g), 0}, {0.1, SpectralField(g), 1}};
  EXPECT_THROW(energy_reports(two, 0.1, 4, -1), ConfigurationError);
  EXPECT_THROW(energy_reports({}, 0.1, 4, -1), ConfigurationError);
}

TEST(EnergyIdentity, RejectsCoarseOrOddSampling) {
  auto cfg = identity_config(256);
  const auto u0 = random_analytic_data(cfg.grid, 1, 0.5);
  cfg.monitor_stride = 3;
  EXPECT_THROW(run_energy_identity(u0, cfg, {0.3}), ValidationError);
  cfg.monitor_stride = 20;
  EXPECT_THROW(run_energy_identity(u0, cfg, {0.3}), ValidationError);
}

TEST(EnergyIdentity, ResidualWithinQuadratureEstimate) {
  const auto cfg = identity_config();
  for (double amp : {0.1, 0.5, 1.0}) {
    const auto run = run_energy_identity(random_analytic_data(cfg.grid, 42, amp, 1.5), cfg, {0.5});
    ASSERT_EQ(run.reports.size(), run.result.trace.size());
    EXPECT_EQ(run.reports.front().r_sigma, 0.0);
    EXPECT_EQ(run.reports.front().identity_residual, 0.0);
    for (std::size_t i = 0; i < run.reports.size(); ++i) {
      const auto& r = run.reports[i];
      EXPECT_EQ(r.t, run.result.trace[i].t);
      EXPECT_EQ(r.e_sigma, run.result.trace[i].e_sigma);
      EXPECT_LE(r.identity_residual, 10.0 * r.quadrature_error + 1e-14 * run.reports.front().e_sigma) << "t = " << r.t;
    }
    EXPECT_GT(std::abs(run.reports.back().r_sigma), 100.0 * run.reports.back().identity_residual);
  }
}

TEST(EnergyIdentity, SigmaZeroIsConserved) {
  const auto cfg = identity_config();
  const auto run = run_energy_identity(random_analytic_data(cfg.grid, 3, 0.5, 1.5), cfg, {0.0});
  const double me0 = run.reports.front().mass + run.reports.front().energy;
  for (const auto& r : run.reports) {
    EXPECT_EQ(r.r_sigma, 0.0);
    EXPECT_NEAR(r.e_sigma, me0, 1e-8 * me0);
  }
}

TEST(EnergyIdentity, DefocusingLowerBoundAlongRun) {
  auto cfg = identity_config();
  cfg.monitor_stride = 50;
  simulate(random_analytic_data(cfg.grid, 6, 0.8, 1.5), cfg, {}, [&](const SimulationState& s) {
    if (s.step_count % 50 != 0) return;
    EXPECT_GE(modified_energy(s.field, 0.4, 4, -1), quadratic_energy(s.field, 0.4));
  });
}

TEST(AlmostConservation, FactorAndHelpers) {
  EXPECT_DOUBLE_EQ(almost_conservation_factor(2.0, 4), 8.0 * 5.0);
  EXPECT_DOUBLE_EQ(almost_conservation_factor(1.0, 6), 2.0);
  const auto s = log_spaced_sigmas(0.8, 8, 2.5);
  ASSERT_EQ(s.size(), 8u);
  EXPECT_DOUBLE_EQ(s.back(), 0.8);
  EXPECT_NEAR(s.front(), 0.8 * std::pow(10.0, -2.5), 1e-15);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_NEAR(s[i] / s[i - 1], std::pow(10.0, 2.5 / 7.0), 1e-12);
  EXPECT_THROW(log_spaced_sigmas(0.0), ConfigurationError);
  const auto [slope, icpt] = loglog_fit({1.0, 2.0, 4.0, 8.0}, {3.0, 3.0 * std::pow(2.0, 1.7), 3.0 * std::pow(4.0, 1.7),
                                                              3.0 * std::pow(8.0, 1.7)});
  EXPECT_NEAR(slope, 1.7, 1e-12);
  EXPECT_NEAR(icpt, std::log(3.0), 1e-12);
}

TEST(AlmostConservation, SweepScope) {
  auto cfg = identity_config(256);
  const auto u0 = random_analytic_data(cfg.grid, 1, 0.5);
  const auto sig = log_spaced_sigmas(0.5);
  cfg.mu = +1;
  EXPECT_THROW(almost_conservation_sweep(u0, cfg, sig), ValidationError);
  cfg.mu = -1;
  cfg.k = 5;
  EXPECT_THROW(almost_conservation_sweep(u0, cfg, sig), ValidationError);
  cfg.k = 4;
  EXPECT_THROW(almost_conservation_sweep(u0, cfg, {0.1}), ConfigurationError);
  EXPECT_THROW(almost_conservation_sweep(u0, cfg, {0.0, 0.1}), ConfigurationError);
}

TEST(AlmostConservation, DriftGrowsWithSigmaAtLeastLinearly) {
  auto cfg = identity_config();
  cfg.monitor_stride = 10;
  const auto u0 = random_analytic_data(cfg.grid, 42, 0.5, 1.5);
  const auto sweep = almost_conservation_sweep(u0, cfg, log_spaced_sigmas(0.5 * estimate_radius(u0, {})));
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) EXPECT_GE(sweep.rows[i].drift, sweep.rows[i - 1].drift);
  EXPECT_GE(sweep.slope, 0.85);
  const double alpha = 0.95;
  const double c = fitted_almost_conservation_constant(sweep, alpha, 4);
  EXPECT_GT(c, 0.0);
  for (const auto& r : sweep.rows)
    EXPECT_LE(r.drift, c * std::pow(r.sigma, alpha) * almost_conservation_factor(r.e_sigma0, 4) * (1.0 + 1e-12));
}

TEST(AlmostConservation, SharedTrajectoryMatchesPerSigmaRuns) {
  auto cfg = identity_config(256);
  cfg.t_final = 0.2;
  cfg.monitor_stride = 10;
  const auto u0 = random_analytic_data(cfg.grid, 9, 0.5, 1.5);
  const std::vector<double> sigmas{0.05, 0.3};
  const auto sweep = almost_conservation_sweep(u0, cfg, sigmas);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const auto trace = simulate(u0, cfg, {sigmas[i]}).trace;
    double d = 0.0;
    for (const auto& r : trace) d = std::max(d, std::abs(r.e_sigma - trace.front().e_sigma));
    EXPECT_EQ(sweep.rows[i].drift, d);
  }
}
